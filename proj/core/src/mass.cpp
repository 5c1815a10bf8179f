#include "qmt/mass.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmt/error.hpp"

namespace qmt {

MassFunction::MassFunction(Frame frame, std::span<const FocalElement> focal) : frame_(std::move(frame)) {
  std::map<Mask, double> merged;
  double total = 0.0;
  for (const auto& f : focal) {
    if (f.subset == 0) {
      throw Error(ErrorCode::EmptySubset, "focal elements must be nonempty");
    }
    if ((f.subset & ~frame_.all()) != 0) {
      throw Error(ErrorCode::FrameMismatch, "focal element lies outside the frame");
    }
    if (!std::isfinite(f.mass) || f.mass <= 0.0) {
      throw Error(ErrorCode::InvalidMass, "masses must be finite and strictly positive");
    }
    merged[f.subset] += f.mass;
    total += f.mass;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw Error(ErrorCode::InvalidMass, "masses sum to " + std::to_string(total) + ", not 1");
  }
  focal_.reserve(merged.size());
  for (const auto& [s, v] : merged) {
    focal_.push_back({s, v});
  }
}

MassFunction MassFunction::vacuous(const Frame& frame) {
  return MassFunction(frame, std::vector<FocalElement>{{frame.all(), 1.0}}, 0);
}

MassFunction MassFunction::from_trusted(Frame frame, const std::map<Mask, double>& masses) {
  std::vector<FocalElement> focal;
  focal.reserve(masses.size());
  for (const auto& [s, v] : masses) {
    if (v > kDropThreshold) {
      focal.push_back({s, v});
    }
  }
  return MassFunction(std::move(frame), std::move(focal), 0);
}

double MassFunction::mass_of(Mask subset) const noexcept {
  auto it = std::lower_bound(focal_.begin(), focal_.end(), subset,
                             [](const FocalElement& f, Mask s) { return f.subset < s; });
  return (it != focal_.end() && it->subset == subset) ? it->mass : 0.0;
}

double MassFunction::belief(Mask subset) const noexcept {
  double sum = 0.0;
  for (const auto& f : focal_) {
    if ((f.subset & ~subset) == 0) {
      sum += f.mass;
    }
  }
  return sum;
}

bool MassFunction::is_vacuous() const noexcept {
  return focal_.size() == 1 && focal_.front().subset == frame_.all();
}

double belief_of(const MassFunction& m, const Subset& a) {
  require_same_frame(m.frame(), a.frame(), "belief_of");
  return std::clamp(m.belief(a.bits()), 0.0, 1.0);
}

BeliefTable belief_table(const MassFunction& m) {
  const std::size_t n = m.frame().size();
  if (n > kMaxTableFrameSize) {
    throw Error(ErrorCode::FrameTooLarge, "belief tables are limited to " + std::to_string(kMaxTableFrameSize) +
                                              " elements");
  }
  std::vector<double> values(std::size_t{1} << n, 0.0);
  for (Mask a = 0; a < values.size(); ++a) {
    values[a] = m.belief(a);
  }
  return BeliefTable{m.frame(), std::move(values)};
}

MassFunction mass_from_belief(const BeliefTable& bel) {
  const std::size_t n = bel.frame.size();
  if (n > kMaxTableFrameSize) {
    throw Error(ErrorCode::FrameTooLarge, "Möbius inversion is limited to " + std::to_string(kMaxTableFrameSize) +
                                              " elements");
  }
  const std::size_t count = std::size_t{1} << n;
  if (bel.values.size() != count) {
    throw Error(ErrorCode::NotABeliefFunction, "table must cover all " + std::to_string(count) + " subsets");
  }
  if (std::abs(bel.values[0]) > kMassTolerance) {
    throw Error(ErrorCode::NotABeliefFunction, "Bel(∅) must be 0");
  }
  std::map<Mask, double> masses;
  double total = 0.0;
  for (Mask a = 1; a < count; ++a) {
    double m = 0.0;
    // Enumerate every B ⊆ A, including ∅.
    for (Mask b = a;; b = (b - 1) & a) {
      const int parity = popcount(a & ~b) & 1;
      m += parity ? -bel.values[b] : bel.values[b];
      if (b == 0) {
        break;
      }
    }
    if (m < -kMassTolerance) {
      throw Error(ErrorCode::NotABeliefFunction, "negative mass on subset " + std::to_string(a));
    }
    if (m > kMassTolerance) {
      masses[a] = m;
      total += m;
    }
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw Error(ErrorCode::NotABeliefFunction, "recovered masses sum to " + std::to_string(total));
  }
  return MassFunction::from_trusted(bel.frame, masses);
}

CombinationReport dempster_combine(const MassFunction& m1, const MassFunction& m2) {
  require_same_frame(m1.frame(), m2.frame(), "dempster_combine");
  std::map<Mask, double> products;
  double conflict = 0.0;
  double kept = 0.0;
  for (const auto& a : m1.focal()) {
    for (const auto& b : m2.focal()) {
      const double p = a.mass * b.mass;
      const Mask s = a.subset & b.subset;
      if (s == 0) {
        conflict += p;
      } else {
        products[s] += p;
        kept += p;
      }
    }
  }
  if (kept <= kConflictTolerance) {
    throw Error(ErrorCode::TotalConflict, "no focal elements intersect");
  }
  // With no conflict the products are left untouched, so combining with the
  // vacuous function reproduces its argument exactly.
  if (conflict > 0.0) {
    for (auto& [s, v] : products) {
      v /= kept;
    }
  }
  return CombinationReport{MassFunction::from_trusted(m1.frame(), products), std::min(conflict, 1.0)};
}

CombinationReport combine_many(std::span<const MassFunction> ms) {
  if (ms.empty()) {
    throw Error(ErrorCode::EmptyList, "combine_many of an empty list");
  }
  MassFunction acc = ms.front();
  double surviving = 1.0;
  for (const auto& m : ms.subspan(1)) {
    auto step = dempster_combine(acc, m);
    surviving *= 1.0 - step.conflict_mass;
    acc = std::move(step.result);
  }
  return CombinationReport{std::move(acc), 1.0 - surviving};
}

bool is_carried_by(const MassFunction& m, const Partition& p) {
  require_same_frame(m.frame(), p.frame(), "is_carried_by");
  return std::all_of(m.focal().begin(), m.focal().end(),
                     [&](const FocalElement& f) { return p.is_union_of_blocks(f.subset); });
}

Partition associated_partition(const MassFunction& m) {
  const auto focal = m.focal();
  std::map<std::vector<bool>, Mask> classes;
  for (std::size_t e = 0; e < m.frame().size(); ++e) {
    std::vector<bool> signature(focal.size());
    for (std::size_t k = 0; k < focal.size(); ++k) {
      signature[k] = ((focal[k].subset >> e) & 1U) != 0;
    }
    classes[signature] |= Mask{1} << e;
  }
  std::vector<Mask> blocks;
  blocks.reserve(classes.size());
  for (const auto& [sig, block] : classes) {
    blocks.push_back(block);
  }
  return Partition::from_masks(m.frame(), std::move(blocks));
}

MassFunction coarsen(const MassFunction& m, const Partition& p) {
  require_same_frame(m.frame(), p.frame(), "coarsen");
  std::map<Mask, double> out;
  for (const auto& f : m.focal()) {
    out[p.touching(f.subset)] += f.mass;
  }
  return MassFunction::from_trusted(p.coarse_frame(), out);
}

MassFunction vacuous_extend(const MassFunction& m, const Partition& p) {
  require_same_frame(m.frame(), p.coarse_frame(), "vacuous_extend");
  std::map<Mask, double> out;
  for (const auto& f : m.focal()) {
    out[p.union_of(f.subset)] += f.mass;
  }
  return MassFunction::from_trusted(p.frame(), out);
}

IncidenceKernel::IncidenceKernel(const Partition& source, const Partition& target)
    : source_frame_(source.coarse_frame()), target_frame_(target.coarse_frame()) {
  require_same_frame(source.frame(), target.frame(), "incidence kernel");
  rows_.reserve(source.block_count());
  for (Mask b : source.blocks()) {
    rows_.push_back(target.touching(b));
  }
}

Mask IncidenceKernel::image(Mask source_blocks) const noexcept {
  Mask out = 0;
  for_each_bit(source_blocks, [&](std::size_t r) {
    if (r < rows_.size()) {
      out |= rows_[r];
    }
  });
  return out;
}

IncidenceKernel IncidenceKernel::transpose() const {
  std::vector<Mask> cols(target_frame_.size(), 0);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for_each_bit(rows_[r], [&](std::size_t c) { cols[c] |= Mask{1} << r; });
  }
  return IncidenceKernel(target_frame_, source_frame_, std::move(cols));
}

MassFunction project(const MassFunction& m, const IncidenceKernel& kernel) {
  require_same_frame(m.frame(), kernel.source_frame(), "project");
  std::map<Mask, double> out;
  for (const auto& f : m.focal()) {
    out[kernel.image(f.subset)] += f.mass;
  }
  return MassFunction::from_trusted(kernel.target_frame(), out);
}

MassFunction project(const MassFunction& m, const Partition& p1, const Partition& p2) {
  return project(m, IncidenceKernel(p1, p2));
}

double max_deviation(const MassFunction& a, const MassFunction& b) {
  require_same_frame(a.frame(), b.frame(), "max_deviation");
  double worst = 0.0;
  for (const auto& f : a.focal()) {
    worst = std::max(worst, std::abs(f.mass - b.mass_of(f.subset)));
  }
  for (const auto& f : b.focal()) {
    worst = std::max(worst, std::abs(f.mass - a.mass_of(f.subset)));
  }
  return worst;
}

bool same_focal_structure(const MassFunction& a, const MassFunction& b) {
  if (!(a.frame() == b.frame())) {
    return false;
  }
  auto support = [](const MassFunction& m) {
    std::vector<Mask> s;
    for (const auto& f : m.focal()) {
      if (f.mass > kDropThreshold) {
        s.push_back(f.subset);
      }
    }
    return s;
  };
  return support(a) == support(b);
}

bool approx_equal(const MassFunction& a, const MassFunction& b, double tol) {
  return same_focal_structure(a, b) && max_deviation(a, b) <= tol;
}

}  // namespace qmt
