#include "qmt/frame.hpp"

#include <algorithm>
#include <unordered_set>

#include "qmt/error.hpp"

namespace qmt {

Frame Frame::make(std::vector<std::string> labels, std::size_t max_size) {
  if (labels.empty()) {
    throw Error(ErrorCode::EmptyFrame, "a frame needs at least one element");
  }
  const std::size_t cap = std::min(max_size, kHardMaxFrameSize);
  if (labels.size() > cap) {
    throw Error(ErrorCode::FrameTooLarge,
                std::to_string(labels.size()) + " elements exceeds the cap of " + std::to_string(cap));
  }
  auto data = std::make_shared<Data>();
  data->index.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!data->index.emplace(labels[i], i).second) {
      throw Error(ErrorCode::DuplicateLabel, "label '" + labels[i] + "' appears twice");
    }
  }
  data->labels = std::move(labels);
  return Frame(std::move(data));
}

Frame Frame::coarse(std::size_t block_count) {
  std::vector<std::string> labels;
  labels.reserve(block_count);
  for (std::size_t i = 0; i < block_count; ++i) {
    labels.push_back("B" + std::to_string(i));
  }
  return make(std::move(labels), kHardMaxFrameSize);
}

std::optional<std::size_t> Frame::find(std::string_view label) const {
  auto it = data_->index.find(std::string(label));
  if (it == data_->index.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::size_t Frame::index_of(std::string_view label) const {
  if (auto idx = find(label)) {
    return *idx;
  }
  throw Error(ErrorCode::UnknownLabel, "label '" + std::string(label) + "' is not in the frame");
}

Subset Frame::full() const { return Subset(*this, all()); }

Subset Frame::empty() const { return Subset(*this, 0); }

Subset Frame::singleton(std::size_t index) const {
  if (index >= size()) {
    throw Error(ErrorCode::FrameMismatch, "element index out of range");
  }
  return Subset(*this, Mask{1} << index);
}

Subset Frame::subset(std::span<const std::string> labels) const {
  Mask bits = 0;
  for (const auto& l : labels) {
    bits |= Mask{1} << index_of(l);
  }
  return Subset(*this, bits);
}

Subset Frame::subset(std::initializer_list<std::string_view> labels) const {
  Mask bits = 0;
  for (auto l : labels) {
    bits |= Mask{1} << index_of(l);
  }
  return Subset(*this, bits);
}

Subset Frame::subset_from_mask(Mask bits) const { return Subset(*this, bits); }

bool operator==(const Frame& a, const Frame& b) noexcept {
  return a.data_ == b.data_ || a.data_->labels == b.data_->labels;
}

void require_same_frame(const Frame& a, const Frame& b, std::string_view what) {
  if (!(a == b)) {
    throw Error(ErrorCode::FrameMismatch, std::string(what) + " operands live on different frames");
  }
}

// ---------------------------------------------------------------------------

Subset::Subset(Frame frame, Mask bits) : frame_(std::move(frame)), bits_(bits) {
  if ((bits_ & ~frame_.all()) != 0) {
    throw Error(ErrorCode::FrameMismatch, "subset bits lie outside the frame");
  }
}

Subset Subset::unite(const Subset& other) const {
  require_same_frame(frame_, other.frame_, "union");
  return Subset(frame_, bits_ | other.bits_);
}

Subset Subset::intersect(const Subset& other) const {
  require_same_frame(frame_, other.frame_, "intersection");
  return Subset(frame_, bits_ & other.bits_);
}

Subset Subset::minus(const Subset& other) const {
  require_same_frame(frame_, other.frame_, "difference");
  return Subset(frame_, bits_ & ~other.bits_);
}

Subset Subset::complement() const { return Subset(frame_, frame_.all() & ~bits_); }

bool Subset::is_subset_of(const Subset& other) const {
  require_same_frame(frame_, other.frame_, "containment");
  return (bits_ & ~other.bits_) == 0;
}

std::vector<std::string> Subset::labels() const {
  std::vector<std::string> out;
  for_each_bit(bits_, [&](std::size_t i) { out.push_back(frame_.label(i)); });
  return out;
}

// ---------------------------------------------------------------------------

Partition::Partition(Frame frame, std::vector<Mask> blocks)
    : frame_(std::move(frame)), coarse_(Frame::coarse(blocks.size())), blocks_(std::move(blocks)) {
  owner_.assign(frame_.size(), 0);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    for_each_bit(blocks_[b], [&](std::size_t e) { owner_[e] = b; });
  }
}

Partition Partition::make(const Frame& frame, std::span<const Subset> blocks) {
  std::vector<Mask> masks;
  masks.reserve(blocks.size());
  for (const auto& b : blocks) {
    require_same_frame(frame, b.frame(), "partition block");
    masks.push_back(b.bits());
  }
  return from_masks(frame, std::move(masks));
}

Partition Partition::from_masks(const Frame& frame, std::vector<Mask> blocks) {
  Mask seen = 0;
  for (Mask b : blocks) {
    if (b == 0) {
      throw Error(ErrorCode::EmptyBlock, "partition blocks must be nonempty");
    }
    if ((b & ~frame.all()) != 0) {
      throw Error(ErrorCode::FrameMismatch, "partition block lies outside the frame");
    }
    if ((seen & b) != 0) {
      throw Error(ErrorCode::OverlappingBlocks, "partition blocks must be disjoint");
    }
    seen |= b;
  }
  if (seen != frame.all()) {
    throw Error(ErrorCode::IncompleteCover, "partition blocks must cover the frame");
  }
  std::sort(blocks.begin(), blocks.end(),
            [](Mask a, Mask b) { return std::countr_zero(a) < std::countr_zero(b); });
  return Partition(frame, std::move(blocks));
}

Partition Partition::trivial(const Frame& frame) { return Partition(frame, {frame.all()}); }

Partition Partition::singletons(const Frame& frame) {
  std::vector<Mask> blocks;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    blocks.push_back(Mask{1} << i);
  }
  return Partition(frame, std::move(blocks));
}

Mask Partition::touching(Mask bits) const noexcept {
  Mask out = 0;
  for_each_bit(bits & frame_.all(), [&](std::size_t e) { out |= Mask{1} << owner_[e]; });
  return out;
}

Mask Partition::union_of(Mask coarse_bits) const noexcept {
  Mask out = 0;
  for_each_bit(coarse_bits, [&](std::size_t b) {
    if (b < blocks_.size()) {
      out |= blocks_[b];
    }
  });
  return out;
}

Subset blocks_touching(const Subset& s, const Partition& p) {
  require_same_frame(s.frame(), p.frame(), "blocks_touching");
  if (s.is_empty()) {
    throw Error(ErrorCode::EmptySubset, "blocks_touching needs a nonempty subset");
  }
  return Subset(p.coarse_frame(), p.touching(s.bits()));
}

bool is_coarser(const Partition& p1, const Partition& p2) {
  require_same_frame(p1.frame(), p2.frame(), "is_coarser");
  // A block of p2 lies in a block of p1 iff it touches exactly one of them.
  return std::all_of(p2.blocks().begin(), p2.blocks().end(),
                     [&](Mask b) { return popcount(p1.touching(b)) == 1; });
}

bool is_strictly_coarser(const Partition& p1, const Partition& p2) {
  return is_coarser(p1, p2) && !(p1 == p2);
}

Partition meet(std::span<const Partition> parts) {
  if (parts.empty()) {
    throw Error(ErrorCode::EmptyList, "meet of an empty list");
  }
  const Frame& frame = parts.front().frame();
  std::vector<Mask> current(parts.front().blocks().begin(), parts.front().blocks().end());
  for (const auto& p : parts.subspan(1)) {
    require_same_frame(frame, p.frame(), "meet");
    std::vector<Mask> next;
    for (Mask a : current) {
      for (Mask b : p.blocks()) {
        if ((a & b) != 0) {
          next.push_back(a & b);
        }
      }
    }
    current = std::move(next);
  }
  return Partition::from_masks(frame, std::move(current));
}

Partition meet(const Partition& a, const Partition& b) {
  const Partition parts[] = {a, b};
  return meet(parts);
}

namespace {

// Depth-first search over block selections compatible with `given_bits`.
// `running` is the intersection of the conditioning block with the blocks
// chosen so far.
bool search_violation(std::span<const Partition> parts, Mask given_bits, Mask running, std::size_t depth,
                      std::vector<std::size_t>& selection) {
  if (depth == parts.size()) {
    return running == 0;
  }
  const auto blocks = parts[depth].blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if ((blocks[b] & given_bits) == 0) {
      continue;
    }
    selection.push_back(b);
    const Mask next = running & blocks[b];
    if (next == 0) {
      // Every remaining partition covers the conditioning block, so the
      // selection can always be completed with a compatible block.
      for (std::size_t d = depth + 1; d < parts.size(); ++d) {
        selection.push_back(parts[d].block_of(static_cast<std::size_t>(std::countr_zero(given_bits))));
      }
      return true;
    }
    if (search_violation(parts, given_bits, next, depth + 1, selection)) {
      return true;
    }
    selection.pop_back();
  }
  return false;
}

}  // namespace

std::optional<IndependenceWitness> find_cond_independence_violation(std::span<const Partition> parts,
                                                                    const Partition& given) {
  for (const auto& p : parts) {
    require_same_frame(given.frame(), p.frame(), "conditional independence");
  }
  for (std::size_t g = 0; g < given.block_count(); ++g) {
    std::vector<std::size_t> selection;
    if (search_violation(parts, given.block_mask(g), given.block_mask(g), 0, selection)) {
      return IndependenceWitness{g, std::move(selection)};
    }
  }
  return std::nullopt;
}

bool qualitatively_cond_independent(std::span<const Partition> parts, const Partition& given) {
  return !find_cond_independence_violation(parts, given).has_value();
}

bool qualitatively_independent(std::span<const Partition> parts) {
  if (parts.empty()) {
    return true;
  }
  return qualitatively_cond_independent(parts, Partition::trivial(parts.front().frame()));
}

}  // namespace qmt
