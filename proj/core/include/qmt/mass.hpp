#pragma once

#include <map>
#include <span>
#include <vector>

#include "qmt/frame.hpp"

namespace qmt {

/// Tolerance on the total mass of a mass function.
inline constexpr double kMassTolerance = 1e-9;
/// Tolerance on per-focal-set mass differences when comparing results.
inline constexpr double kCompareTolerance = 1e-9;
/// Combination results drop focal sets whose mass is at or below this.
inline constexpr double kDropThreshold = 1e-12;
/// Normalisation constants at or below this count as total conflict.
inline constexpr double kConflictTolerance = 1e-12;
/// Frames beyond this size have no belief tables or Möbius inversion.
inline constexpr std::size_t kMaxTableFrameSize = 16;

struct FocalElement {
  Mask subset = 0;
  double mass = 0.0;

  friend bool operator==(const FocalElement&, const FocalElement&) = default;
};

/// Distribution of a random nonempty subset over its focal elements. The
/// belief function it induces is Bel(A) = Σ{m(S) : S ⊆ A}. Focal elements are
/// stored sorted by mask value, which is the canonical order everywhere.
class MassFunction {
public:
  /// Validating constructor: focal sets nonempty and inside the frame, masses
  /// strictly positive, total within kMassTolerance of 1. Repeated subsets are
  /// merged. Throws InvalidMass, EmptySubset or FrameMismatch.
  MassFunction(Frame frame, std::span<const FocalElement> focal);
  MassFunction(Frame frame, std::initializer_list<FocalElement> focal)
      : MassFunction(std::move(frame), std::span<const FocalElement>(focal.begin(), focal.size())) {}

  static MassFunction vacuous(const Frame& frame);

  /// Builds from an accumulated distribution known to be valid, dropping
  /// entries at or below kDropThreshold. No total-mass check.
  static MassFunction from_trusted(Frame frame, const std::map<Mask, double>& masses);

  const Frame& frame() const noexcept { return frame_; }
  std::span<const FocalElement> focal() const noexcept { return focal_; }
  std::size_t focal_count() const noexcept { return focal_.size(); }

  double mass_of(Mask subset) const noexcept;
  double belief(Mask subset) const noexcept;
  bool is_vacuous() const noexcept;

private:
  MassFunction(Frame frame, std::vector<FocalElement> focal, int /*trusted*/)
      : frame_(std::move(frame)), focal_(std::move(focal)) {}

  Frame frame_;
  std::vector<FocalElement> focal_;
};

/// Bel(a). Throws FrameMismatch.
double belief_of(const MassFunction& m, const Subset& a);

/// Bel over every subset of a frame, indexed by mask.
struct BeliefTable {
  Frame frame;
  std::vector<double> values;
};

/// Throws FrameTooLarge beyond kMaxTableFrameSize elements.
BeliefTable belief_table(const MassFunction& m);

/// Möbius inversion m(A) = Σ_{B⊆A} (−1)^{|A∖B|} Bel(B). Throws
/// NotABeliefFunction or FrameTooLarge.
MassFunction mass_from_belief(const BeliefTable& bel);

struct CombinationReport {
  MassFunction result;
  /// Product mass that fell on empty intersections before renormalisation.
  double conflict_mass = 0.0;
};

/// Dempster's rule. Throws TotalConflict or FrameMismatch.
CombinationReport dempster_combine(const MassFunction& m1, const MassFunction& m2);

/// Left fold of dempster_combine. The reported conflict is the share of the
/// raw product measure discarded overall: 1 − Π(1 − K_step). Throws EmptyList,
/// TotalConflict or FrameMismatch.
CombinationReport combine_many(std::span<const MassFunction> ms);

/// Every focal element is a union of blocks of p.
bool is_carried_by(const MassFunction& m, const Partition& p);

/// Coarsest partition carrying m: elements are grouped when they belong to
/// exactly the same focal elements.
Partition associated_partition(const MassFunction& m);

/// Coarsening to the frame of p's blocks: m_p(B) = Σ{m(S) : blocks touching S = B}.
MassFunction coarsen(const MassFunction& m, const Partition& p);

/// Vacuous extension of a mass function on p's coarse frame to p's frame.
MassFunction vacuous_extend(const MassFunction& m, const Partition& p);

/// Block-incidence relation between two partitions of one frame: row r is the
/// coarse mask of target blocks meeting source block r.
class IncidenceKernel {
public:
  IncidenceKernel(const Partition& source, const Partition& target);

  std::size_t rows() const noexcept { return rows_.size(); }
  std::size_t cols() const noexcept { return target_frame_.size(); }
  bool at(std::size_t row, std::size_t col) const { return ((rows_.at(row) >> col) & 1U) != 0; }
  Mask row(std::size_t r) const { return rows_.at(r); }

  const Frame& source_frame() const noexcept { return source_frame_; }
  const Frame& target_frame() const noexcept { return target_frame_; }

  /// Image of a source block set: target blocks meeting its union.
  Mask image(Mask source_blocks) const noexcept;

  IncidenceKernel transpose() const;

private:
  IncidenceKernel(Frame source, Frame target, std::vector<Mask> rows)
      : source_frame_(std::move(source)), target_frame_(std::move(target)), rows_(std::move(rows)) {}

  Frame source_frame_;
  Frame target_frame_;
  std::vector<Mask> rows_;
};

/// Moves a mass function on p1's coarse frame to p2's coarse frame; equals
/// coarsen(vacuous_extend(m, p1), p2).
MassFunction project(const MassFunction& m, const Partition& p1, const Partition& p2);
MassFunction project(const MassFunction& m, const IncidenceKernel& kernel);

/// Largest per-focal-set mass difference over the union of both supports.
/// Throws FrameMismatch.
double max_deviation(const MassFunction& a, const MassFunction& b);

/// Same focal sets (after dropping masses ≤ kDropThreshold) and every mass
/// within tol.
bool approx_equal(const MassFunction& a, const MassFunction& b, double tol = kCompareTolerance);

bool same_focal_structure(const MassFunction& a, const MassFunction& b);

}  // namespace qmt
