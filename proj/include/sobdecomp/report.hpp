#pragma once

#include <iosfwd>
#include <vector>

#include <nlohmann/json.hpp>

#include "sobdecomp/harmonic.hpp"
#include "sobdecomp/projection.hpp"

namespace sobdecomp {

nlohmann::ordered_json decomp_to_json(const DecompResult& d);
nlohmann::ordered_json family_to_json(const SolutionFamily& fam);
nlohmann::ordered_json three_way_to_json(const ThreeWayReport& rep);

/// CSV with columns x,f,f1,f2 (17 significant digits).
void write_decompose_csv(std::ostream& out, const GridFunction& f,
                         const GridFunction& f1, const GridFunction& f2);

/// CSV with columns x,particular,basis_0,...,basis_{k-1}.
void write_family_csv(std::ostream& out, const SolutionFamily& fam);

}  // namespace sobdecomp
