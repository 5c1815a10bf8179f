#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qmt {

/// Bit mask over the element positions of a frame. Bit k set means element k
/// is in the subset.
using Mask = std::uint64_t;

inline constexpr std::size_t kDefaultMaxFrameSize = 24;
inline constexpr std::size_t kHardMaxFrameSize = 64;

inline constexpr Mask full_mask(std::size_t size) {
  return size >= 64 ? ~Mask{0} : (Mask{1} << size) - 1;
}

inline int popcount(Mask m) { return std::popcount(m); }

/// Calls fn(index) for every set bit of m, lowest first.
template <typename Fn>
void for_each_bit(Mask m, Fn&& fn) {
  while (m != 0) {
    fn(static_cast<std::size_t>(std::countr_zero(m)));
    m &= m - 1;
  }
}

class Subset;

/// An ordered finite set of mutually exclusive answers. Element order fixes
/// bit positions. Identity is by content: two frames built from the same label
/// list compare equal and interoperate.
class Frame {
public:
  static Frame make(std::vector<std::string> labels, std::size_t max_size = kDefaultMaxFrameSize);

  /// The coarse frame whose elements are the blocks of a partition, labelled
  /// "B0", "B1", ... in canonical block order.
  static Frame coarse(std::size_t block_count);

  std::size_t size() const noexcept { return data_->labels.size(); }
  const std::vector<std::string>& labels() const noexcept { return data_->labels; }
  const std::string& label(std::size_t index) const { return data_->labels.at(index); }

  std::optional<std::size_t> find(std::string_view label) const;
  /// Throws UnknownLabel.
  std::size_t index_of(std::string_view label) const;

  Mask all() const noexcept { return full_mask(size()); }

  Subset full() const;
  Subset empty() const;
  Subset singleton(std::size_t index) const;
  Subset subset(std::span<const std::string> labels) const;
  Subset subset(std::initializer_list<std::string_view> labels) const;
  /// Throws FrameMismatch when bits lie outside the frame.
  Subset subset_from_mask(Mask bits) const;

  friend bool operator==(const Frame& a, const Frame& b) noexcept;

private:
  struct Data {
    std::vector<std::string> labels;
    std::unordered_map<std::string, std::size_t> index;
  };

  explicit Frame(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

  std::shared_ptr<const Data> data_;
};

/// Throws FrameMismatch when the frames differ.
void require_same_frame(const Frame& a, const Frame& b, std::string_view what);

/// A subset of a specific frame.
class Subset {
public:
  Subset(Frame frame, Mask bits);

  const Frame& frame() const noexcept { return frame_; }
  Mask bits() const noexcept { return bits_; }

  bool is_empty() const noexcept { return bits_ == 0; }
  std::size_t cardinality() const noexcept { return static_cast<std::size_t>(popcount(bits_)); }
  bool contains(std::size_t index) const noexcept { return index < 64 && ((bits_ >> index) & 1U) != 0; }

  Subset unite(const Subset& other) const;
  Subset intersect(const Subset& other) const;
  Subset minus(const Subset& other) const;
  Subset complement() const;
  bool is_subset_of(const Subset& other) const;

  std::vector<std::string> labels() const;

  friend Subset operator|(const Subset& a, const Subset& b) { return a.unite(b); }
  friend Subset operator&(const Subset& a, const Subset& b) { return a.intersect(b); }
  friend Subset operator~(const Subset& a) { return a.complement(); }
  friend bool operator==(const Subset& a, const Subset& b) noexcept {
    return a.bits_ == b.bits_ && a.frame_ == b.frame_;
  }

private:
  Frame frame_;
  Mask bits_;
};

/// Disjoint nonempty blocks covering a frame, kept in canonical order (by
/// smallest contained element). A partition doubles as a coarse frame.
class Partition {
public:
  /// Throws EmptyBlock, OverlappingBlocks, IncompleteCover or FrameMismatch.
  static Partition make(const Frame& frame, std::span<const Subset> blocks);
  static Partition from_masks(const Frame& frame, std::vector<Mask> blocks);

  /// The coarsest partition {Θ}.
  static Partition trivial(const Frame& frame);
  /// The finest partition, one block per element.
  static Partition singletons(const Frame& frame);

  const Frame& frame() const noexcept { return frame_; }
  const Frame& coarse_frame() const noexcept { return coarse_; }

  std::size_t block_count() const noexcept { return blocks_.size(); }
  std::span<const Mask> blocks() const noexcept { return blocks_; }
  Mask block_mask(std::size_t index) const { return blocks_.at(index); }
  Subset block(std::size_t index) const { return Subset(frame_, blocks_.at(index)); }

  /// Index of the block containing the given frame element.
  std::size_t block_of(std::size_t element) const { return owner_.at(element); }

  /// Coarse mask of the blocks meeting `bits`.
  Mask touching(Mask bits) const noexcept;
  /// Union of the blocks selected by a coarse mask.
  Mask union_of(Mask coarse_bits) const noexcept;
  bool is_union_of_blocks(Mask bits) const noexcept { return union_of(touching(bits)) == bits; }

  friend bool operator==(const Partition& a, const Partition& b) noexcept {
    return a.blocks_ == b.blocks_ && a.frame_ == b.frame_;
  }

private:
  Partition(Frame frame, std::vector<Mask> blocks);

  Frame frame_;
  Frame coarse_;
  std::vector<Mask> blocks_;
  std::vector<std::size_t> owner_;
};

/// Blocks of `p` meeting the nonempty subset `s`, as a subset of p's coarse
/// frame. Throws FrameMismatch or EmptySubset.
Subset blocks_touching(const Subset& s, const Partition& p);

/// p1 ≥ p2: every block of p2 lies inside some block of p1.
bool is_coarser(const Partition& p1, const Partition& p2);
/// p1 > p2: coarser and distinct.
bool is_strictly_coarser(const Partition& p1, const Partition& p2);

/// Coarsest common refinement. Throws EmptyList or FrameMismatch.
Partition meet(std::span<const Partition> parts);
Partition meet(const Partition& a, const Partition& b);

/// Every selection of one block per partition has nonempty intersection.
bool qualitatively_independent(std::span<const Partition> parts);

/// A block selection violating qualitative conditional independence: a block
/// of the conditioning partition and one block per input partition, each
/// meeting the conditioning block, whose joint intersection is empty.
struct IndependenceWitness {
  std::size_t given_block = 0;
  std::vector<std::size_t> selection;
};

std::optional<IndependenceWitness> find_cond_independence_violation(std::span<const Partition> parts,
                                                                    const Partition& given);

bool qualitatively_cond_independent(std::span<const Partition> parts, const Partition& given);

}  // namespace qmt
