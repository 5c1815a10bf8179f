#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "json_io.hpp"
#include "qmt/error.hpp"
#include "qmt/oracle.hpp"
#include "qmt/propagation.hpp"

namespace qmt::cli {

namespace {

using io::json;

struct PropagateOptions {
  std::string model;
  std::vector<std::string> evidence;
  std::vector<std::string> nodes;
  bool all = false;
  std::string trace;
  bool skip_markov_check = false;
  std::string mode = "batch";
  std::uint64_t seed = 0;
};

struct OracleOptions {
  std::string model;
  std::vector<std::string> evidence;
  double tol = kCompareTolerance;
};

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::TotalConflict: return kTotalConflict;
    case ErrorCode::MarkovViolation: return kMarkovViolation;
    default: return kInputError;
  }
}

std::size_t oracle_frame_cap() {
  if (const char* env = std::getenv("QMT_MAX_FRAME")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) {
      return static_cast<std::size_t>(v);
    }
  }
  return oracle::kDefaultFrameCap;
}

// Model plus every evidence item: embedded ones first, then files in order.
io::ModelDocument load(const std::string& model_path, const std::vector<std::string>& evidence_paths) {
  auto doc = io::model_from_json(io::read_json_file(model_path));
  for (const auto& path : evidence_paths) {
    auto items = io::evidence_from_json(io::read_json_file(path), doc.network);
    doc.evidence.insert(doc.evidence.end(), std::make_move_iterator(items.begin()),
                        std::make_move_iterator(items.end()));
  }
  return doc;
}

Engine make_engine(const io::ModelDocument& doc, MarkovCheck policy) {
  Engine engine = Engine::create(doc.network, policy);
  for (const auto& item : doc.evidence) {
    engine.enter_evidence(item.node, item.mass);
  }
  return engine;
}

json violation_to_json(const MarkovViolation& v, const Network& net) {
  json selection = json::array();
  for (Mask s : v.selection) {
    selection.push_back(io::subset_to_json(Subset(net.frame(), s)));
  }
  return {{"valid", false},
          {"node", v.node},
          {"components", v.components},
          {"witness", {{"given", io::subset_to_json(Subset(net.frame(), v.given_block))}, {"selection", selection}}}};
}

int cmd_validate(const std::string& model_path, std::ostream& out) {
  const auto doc = load(model_path, {});
  const auto report = validate_markov(doc.network);
  if (!report.valid) {
    out << io::dump(violation_to_json(*report.violation, doc.network));
    return kMarkovViolation;
  }
  out << io::dump(json{{"valid", true}, {"nodes", doc.network.node_count()}});
  return kOk;
}

int cmd_canonicalize(const std::string& model_path, std::ostream& out) {
  out << io::dump(io::model_to_json(load(model_path, {})));
  return kOk;
}

int cmd_propagate(const PropagateOptions& opt, std::ostream& out) {
  const auto doc = load(opt.model, opt.evidence);
  Engine engine = make_engine(doc, opt.skip_markov_check ? MarkovCheck::Skip : MarkovCheck::Validate);
  const FiringLog log = opt.mode == "concurrent" ? engine.propagate_concurrent(opt.seed) : engine.propagate_batch();

  std::vector<std::string> targets = opt.nodes;
  if (opt.all || targets.empty()) {
    const auto ids = engine.network().ids();
    targets.assign(ids.begin(), ids.end());
  }
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  json marginals = json::object();
  for (const auto& id : targets) {
    marginals[id] = io::marginal_to_json(engine.marginal(id), engine.network().partition(id));
  }
  if (!opt.trace.empty()) {
    std::ofstream trace(opt.trace, std::ios::binary);
    if (!trace) {
      throw Error(ErrorCode::ParseError, "cannot write trace file '" + opt.trace + "'");
    }
    trace << io::firing_log_to_jsonl(log);
  }
  out << io::dump(json{{"marginals", marginals}});
  return kOk;
}

int cmd_oracle_check(const OracleOptions& opt, std::ostream& out) {
  const auto doc = load(opt.model, opt.evidence);
  const std::size_t cap = oracle_frame_cap();
  if (doc.network.frame().size() > cap) {
    throw Error(ErrorCode::FrameTooLarge, "the oracle handles frames of at most " + std::to_string(cap) +
                                              " elements, got " + std::to_string(doc.network.frame().size()));
  }
  Engine engine = make_engine(doc, MarkovCheck::Validate);
  const auto report = oracle::check_propagation(engine, opt.tol, cap);
  json deviations = json::object();
  for (const auto& d : report.deviations) {
    deviations[d.node] = io::round_significant(d.deviation);
  }
  out << io::dump(json{{"deviations", deviations},
                       {"max_deviation", io::round_significant(report.max_deviation)},
                       {"pass", report.pass},
                       {"tol", opt.tol}});
  return report.pass ? kOk : kDeviation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Belief-function propagation in qualitative Markov trees", "qmt"};
  app.require_subcommand(1);

  std::string validate_model;
  auto* validate = app.add_subcommand("validate", "Check that a model is a qualitative Markov tree");
  validate->add_option("model", validate_model, "Model JSON file")->required();

  std::string canonical_model;
  auto* canonicalize = app.add_subcommand("canonicalize", "Print a model in canonical form");
  canonicalize->add_option("model", canonical_model, "Model JSON file")->required();

  PropagateOptions prop;
  auto* propagate = app.add_subcommand("propagate", "Propagate evidence and print node marginals");
  propagate->add_option("model", prop.model, "Model JSON file")->required();
  propagate->add_option("evidence", prop.evidence, "Evidence JSON files");
  auto* node_opt = propagate->add_option("--node", prop.nodes, "Print only this node (repeatable)");
  propagate->add_flag("--all", prop.all, "Print every node (default)")->excludes(node_opt);
  propagate->add_option("--trace", prop.trace, "Write the firing log as JSON lines");
  propagate->add_flag("--skip-markov-check", prop.skip_markov_check, "Do not validate the Markov condition");
  propagate->add_option("--mode", prop.mode, "Scheduler")->check(CLI::IsMember({"batch", "concurrent"}));
  propagate->add_option("--seed", prop.seed, "Interleaving seed for --mode concurrent");

  OracleOptions orc;
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare propagation against global combination");
  oracle_cmd->add_option("model", orc.model, "Model JSON file")->required();
  oracle_cmd->add_option("evidence", orc.evidence, "Evidence JSON files");
  oracle_cmd->add_option("--tol", orc.tol, "Largest allowed per-mass deviation");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (validate->parsed()) {
      return cmd_validate(validate_model, out);
    }
    if (canonicalize->parsed()) {
      return cmd_canonicalize(canonical_model, out);
    }
    if (propagate->parsed()) {
      return cmd_propagate(prop, out);
    }
    return cmd_oracle_check(orc, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const nlohmann::json::exception& e) {
    err << "error: ParseError: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace qmt::cli
