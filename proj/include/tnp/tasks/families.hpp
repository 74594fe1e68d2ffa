#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tnp/tasks/task.hpp"

namespace tnp::tasks {

/// f(x) = 1 - |x - c|^2 / d with c ~ U[0.3, 0.7]^d drawn from member_seed.
BlackBoxTask quad_family(std::uint64_t member_seed, std::size_t dim = 2);

/// Standard Branin on x1 in [-5, 10], x2 in [0, 15] (minimization form).
double branin(double x1, double x2);

/// Negated Branin on [0,1]^2, rescaled so values lie roughly in [0,1]
/// (1 at the unshifted global minima). The input is translated by shift
/// before mapping to the standard domain. The optimum is located on a
/// 1001 x 1001 grid.
BlackBoxTask branin_task(double shift_x1, double shift_x2, std::string id = "branin");
/// Member with a seeded translation of up to 0.1 per axis.
BlackBoxTask branin_family(std::uint64_t member_seed);

enum class FamilyKind { kGp, kBranin, kQuad, kTabular };

FamilyKind family_kind_from_string(const std::string& name);
std::string to_string(FamilyKind kind);

struct FamilySpec {
  FamilyKind kind = FamilyKind::kQuad;
  std::uint64_t seed = 0;
  std::size_t dim = 2;  // quad and gp; branin is always 2, tabular from files
  double gp_length_scale_min = 0.3;
  double gp_length_scale_max = 1.0;
  std::vector<std::string> tabular_files;

  void validate() const;
};

/// The m-th member of a family; deterministic in (spec, m).
BlackBoxTask make_member(const FamilySpec& spec, std::size_t m);

/// Tabular CSV with header x1..xd,y. Lookup returns the y of the nearest
/// row (Euclidean), lower row index on ties. Candidates are the rows.
BlackBoxTask load_tabular_task(const std::string& path);
BlackBoxTask load_tabular_task(std::istream& in, std::string id);

}  // namespace tnp::tasks
