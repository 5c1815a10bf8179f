#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmt/markov_tree.hpp"
#include "qmt/mass.hpp"
#include "qmt/propagation.hpp"

/// JSON encodings of frames, partitions, mass functions, models, evidence,
/// marginals and firing logs. Object keys come out sorted and numbers are
/// rounded to 12 significant digits, so equal values always print the same.
namespace qmt::io {

using json = nlohmann::json;

inline constexpr int kModelSchemaVersion = 1;
inline constexpr int kSignificantDigits = 12;
/// Marginal output lists beliefs for every block set only up to this many blocks.
inline constexpr std::size_t kMaxBeliefTableBlocks = 12;

double round_significant(double value, int digits = kSignificantDigits);

json frame_to_json(const Frame& frame);
Frame frame_from_json(const json& j, std::size_t max_size = kDefaultMaxFrameSize);

json subset_to_json(const Subset& s);
Subset subset_from_json(const Frame& frame, const json& j);

json partition_to_json(const Partition& p);
Partition partition_from_json(const Frame& frame, const json& j);

/// [{"subset": [labels], "mass": x}, ...] in canonical focal order.
json mass_to_json(const MassFunction& m);
MassFunction mass_from_json(const Frame& frame, const json& j);

/// A list of blocks of `p`, each as its label array.
json block_set_to_json(Mask blocks, const Partition& p);
/// Inverse of block_set_to_json; every entry must be exactly a block of p.
Mask block_set_from_json(const json& j, const Partition& p);

/// [{"blocks": [[labels]...], "mass": x}, ...] for a mass function on p's coarse frame.
json block_mass_to_json(const MassFunction& m, const Partition& p);
MassFunction block_mass_from_json(const json& j, const Partition& p);

struct EvidenceItem {
  NodeId node;
  MassFunction mass;
};

struct ModelDocument {
  int schema_version = kModelSchemaVersion;
  Network network;
  std::vector<EvidenceItem> evidence;
};

/// Throws qmt::Error (ParseError for malformed documents, plus whatever the
/// frame, partition and network constructors reject).
ModelDocument model_from_json(const json& j);
json model_to_json(const ModelDocument& doc);

/// Accepts a single {"node", "mass"} object or an array of them.
std::vector<EvidenceItem> evidence_from_json(const json& j, const Network& net);
json evidence_to_json(const EvidenceItem& item, const Network& net);

json marginal_to_json(const Marginal& marginal, const Partition& p);

/// One JSON object per line: {"from", "rule", "seq", "stamps", "to"}.
std::string firing_log_to_jsonl(const FiringLog& log);

/// Reads and parses a file; throws ParseError on I/O or syntax failure.
json read_json_file(const std::string& path);

/// Canonical text form: two-space indent, trailing newline.
std::string dump(const json& j);

}  // namespace qmt::io
