#include "sobdecomp/report.hpp"

#include <cstdio>
#include <ostream>

namespace sobdecomp {

nlohmann::ordered_json decomp_to_json(const DecompResult& d) {
  return nlohmann::ordered_json{{"orth_residual", d.orth_residual},
                                {"pythagoras_gap", d.pythagoras_gap},
                                {"e_alpha_f", d.e_alpha_f},
                                {"e_alpha_f1", d.e_alpha_f1},
                                {"e_alpha_f2", d.e_alpha_f2}};
}

nlohmann::ordered_json family_to_json(const SolutionFamily& fam) {
  return nlohmann::ordered_json{
      {"family_dim", fam.family_dim()},
      {"constants_allowed", to_string(fam.constants_allowed)},
      {"ode_residual", fam.ode_res},
      {"neumann_residual", fam.neumann_res},
      {"branch_note", fam.branch_note}};
}

nlohmann::ordered_json three_way_to_json(const ThreeWayReport& rep) {
  return nlohmann::ordered_json{{"gap_e_alpha", rep.gap_e_alpha},
                                {"gap_max_node", rep.gap_max_node},
                                {"orth_fg_hs", rep.orth_fg_hs},
                                {"orth_fg_ga", rep.orth_fg_ga},
                                {"orth_hs_ga", rep.orth_hs_ga},
                                {"n_f_nodes", rep.n_f_nodes},
                                {"n_f_components", rep.n_f_components},
                                {"dim_g_alpha", rep.dim_g_alpha},
                                {"dim_identity", rep.dim_identity}};
}

void write_decompose_csv(std::ostream& out, const GridFunction& f,
                         const GridFunction& f1, const GridFunction& f2) {
  out << "x,f,f1,f2\n";
  char buf[160];
  const auto& xs = f.mesh()->nodes();
  for (size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", xs[i],
                  f.values()[i], f1.values()[i], f2.values()[i]);
    out << buf;
  }
}

void write_family_csv(std::ostream& out, const SolutionFamily& fam) {
  out << "x,particular";
  for (size_t j = 0; j < fam.homogeneous_basis.size(); ++j) {
    out << ",basis_" << j;
  }
  out << "\n";
  char buf[48];
  const auto& xs = fam.particular.mesh()->nodes();
  for (size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", xs[i]);
    out << buf;
    std::snprintf(buf, sizeof(buf), ",%.17g", fam.particular.values()[i]);
    out << buf;
    for (const GridFunction& b : fam.homogeneous_basis) {
      std::snprintf(buf, sizeof(buf), ",%.17g", b.values()[i]);
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace sobdecomp
