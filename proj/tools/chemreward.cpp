// chemreward: command-line front end for the reward engine.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <functional>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chemreward/curation.hpp"
#include "chemreward/dataset.hpp"
#include "chemreward/descriptors.hpp"
#include "chemreward/engine.hpp"
#include "chemreward/evalmetrics.hpp"
#include "chemreward/grpo.hpp"
#include "chemreward/molgraph.hpp"
#include "chemreward/patterns.hpp"
#include "chemreward/promptkit.hpp"
#include "chemreward/protocol.hpp"
#include "chemreward/retrieval.hpp"
#include "chemreward/reward.hpp"
#include "chemreward/service.hpp"
#include "chemreward/text.hpp"
#include "chemreward/version.hpp"

namespace cr = chemreward;
using ojson = nlohmann::ordered_json;

namespace {

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  return cr::text::read_file(path);
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) throw cr::Error("io_error", "cannot write " + path);
}

ojson smiles_error_json(const cr::SmilesError& e) {
  ojson j = {{"code", e.code()}, {"message", e.what()}, {"offset", e.offset()}};
  if (e.atom()) j["atom"] = *e.atom();
  return j;
}

ojson descriptors_json(const cr::DescriptorReport& d) {
  const auto lip = cr::lipinski_report(d);
  return {{"logp", d.logp},
          {"mol_weight", d.mol_weight},
          {"hbd", d.hbd},
          {"hba", d.hba},
          {"aromatic_rings", d.aromatic_rings},
          {"aliphatic_rings", d.aliphatic_rings},
          {"stereocenters", d.stereocenters},
          {"heavy_atoms", d.heavy_atoms},
          {"lipinski",
           {{"pass", lip.pass()},
            {"mol_weight_ok", lip.mol_weight_ok},
            {"logp_ok", lip.logp_ok},
            {"hbd_ok", lip.hbd_ok},
            {"hba_ok", lip.hba_ok}}}};
}

/// "SMILES=True" or "SMILES=1".
cr::FewShotExample parse_fewshot_arg(const std::string& arg) {
  const auto eq = arg.rfind('=');
  if (eq == std::string::npos) throw cr::Error("invalid_argument", "few-shot example must be SMILES=label: " + arg);
  auto label = cr::text::parse_label(arg.substr(eq + 1));
  if (!label) throw cr::Error("invalid_argument", "bad few-shot label: " + arg);
  return {arg.substr(0, eq), *label};
}

bool parse_label_arg(const std::string& s) {
  auto label = cr::text::parse_label(s);
  if (!label) throw cr::Error("invalid_argument", "bad label '" + s + "'");
  return *label;
}

int lines_of_smiles(std::istream& in, const std::function<std::string(const cr::MoleculeGraph&)>& ok) {
  int failures = 0;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto smi = std::string(cr::text::trim(line));
    if (smi.empty()) continue;
    try {
      std::cout << "OK\t" << ok(cr::parse_smiles(smi)) << '\n';
    } catch (const cr::SmilesError& e) {
      ++failures;
      std::cout << "ERR\t" << e.offset() << '\t' << e.what() << '\n';
    }
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward engine for molecular property reasoning."};
  app.set_version_flag("--version", std::string(cr::kEngineVersion));
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "Engine config file (default: $CHEMREWARD_CONFIG)");

  // Commands that need the engine resolve it lazily so the molecule tools
  // run without any configuration.
  auto engine = [&]() -> cr::Engine { return cr::Engine(cr::EngineConfig::resolve(config_path)); };

  std::string smiles;
  int status = 0;

  // parse
  auto* parse = app.add_subcommand("parse", "Parse SMILES and print the canonical form");
  parse->add_option("smiles", smiles, "SMILES (omit to read lines from stdin)");
  parse->callback([&] {
    if (smiles.empty()) {
      status = lines_of_smiles(std::cin, [](const cr::MoleculeGraph& g) { return cr::write_smiles(g); });
      return;
    }
    const auto g = cr::parse_smiles(smiles);
    ojson out = {{"smiles", smiles},
                 {"canonical", cr::write_smiles(g)},
                 {"atoms", g.atom_count()},
                 {"bonds", g.bond_count()},
                 {"rings", g.rings().size()},
                 {"fragments", g.fragment_count()}};
    std::cout << out.dump() << '\n';
  });

  // describe
  bool atom_types = false;
  auto* describe = app.add_subcommand("describe", "Descriptor report and Lipinski verdict");
  describe->add_option("smiles", smiles, "SMILES");
  describe->add_flag("--atom-types", atom_types,
                     "Read SMILES lines on stdin; print heavy_type,h_type,total_h per atom");
  describe->callback([&] {
    if (atom_types) {
      status = lines_of_smiles(std::cin, [](const cr::MoleculeGraph& g) {
        const auto types = cr::crippen_atom_types(g);
        std::string row;
        for (int i = 0; i < static_cast<int>(g.atom_count()); ++i) {
          if (i) row += '\t';
          row += types[static_cast<std::size_t>(i)] + "," + cr::crippen_hydrogen_type(g, i) + "," +
                 std::to_string(g.total_h(i));
        }
        return row;
      });
      return;
    }
    if (smiles.empty()) throw CLI::ValidationError("describe", "SMILES required");
    std::cout << descriptors_json(cr::descriptor_report(cr::parse_smiles(smiles))).dump() << '\n';
  });

  // features
  auto* features = app.add_subcommand("features", "Structural features present in a molecule");
  features->add_option("smiles", smiles, "SMILES")->required();
  features->callback([&] {
    const auto fs = cr::extract_features(cr::parse_smiles(smiles), cr::builtin_library());
    ojson out = ojson::object();
    for (const auto& [name, count] : fs.counts()) out[name] = count;
    std::cout << out.dump() << '\n';
  });

  // store
  auto* store = app.add_subcommand("store", "Build or query a few-shot example store");
  store->require_subcommand(1);
  std::vector<std::string> store_inputs;
  std::string store_path, task, smiles_column = "smiles", label_column = "label";
  int radius = cr::kDefaultFingerprintRadius, width = cr::kDefaultFingerprintWidth, k = cr::kDefaultTopK;
  auto* store_build = store->add_subcommand("build", "Build a store from TASK=path.csv datasets");
  store_build->add_option("inputs", store_inputs, "TASK=path.csv")->required();
  store_build->add_option("-o,--output", store_path, "Store file")->required();
  store_build->add_option("--radius", radius);
  store_build->add_option("--width", width);
  store_build->add_option("--smiles-column", smiles_column);
  store_build->add_option("--label-column", label_column);
  store_build->callback([&] {
    std::vector<cr::LabeledMolecule> rows;
    ojson sources = ojson::array();
    for (const auto& spec : store_inputs) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos) throw cr::Error("invalid_argument", "expected TASK=path.csv, got " + spec);
      auto table = cr::ingest_dataset(spec.substr(eq + 1), spec.substr(0, eq), {smiles_column, label_column});
      sources.push_back({{"task", spec.substr(0, eq)},
                         {"source", table.provenance.source},
                         {"rows_read", table.provenance.rows_read},
                         {"skipped", table.provenance.skipped},
                         {"content_hash", table.provenance.content_hash}});
      rows.insert(rows.end(), table.rows.begin(), table.rows.end());
    }
    cr::StoreBuildReport report;
    const auto built = cr::ExampleStore::build(rows, radius, width, &report);
    built.save(store_path);
    ojson out = {{"store", store_path}, {"records", built.records().size()}, {"sources", sources}};
    std::cout << out.dump() << '\n';
  });
  auto* store_query = store->add_subcommand("query", "Top-k neighbours of a molecule");
  store_query->add_option("--store", store_path)->required();
  store_query->add_option("--task", task)->required();
  store_query->add_option("smiles", smiles)->required();
  store_query->add_option("-k", k);
  store_query->callback([&] {
    const auto s = cr::ExampleStore::load(store_path);
    ojson out = ojson::array();
    for (const auto& hit : s.top_k(cr::parse_smiles(smiles), k, task)) {
      const auto& rec = s.records()[hit.record];
      out.push_back({{"smiles", rec.smiles},
                     {"label", rec.label ? "True" : "False"},
                     {"similarity", hit.similarity},
                     {"ordinal", rec.ordinal}});
    }
    std::cout << out.dump() << '\n';
  });

  // prompt
  std::vector<std::string> fewshot_args;
  std::string image;
  auto* prompt = app.add_subcommand("prompt", "Build a task prompt");
  prompt->require_subcommand(1);
  auto* prompt_build = prompt->add_subcommand("build", "Print the prompt for one molecule");
  prompt_build->add_option("--task", task)->required();
  prompt_build->add_option("smiles", smiles)->required();
  prompt_build->add_option("--fewshot", fewshot_args, "SMILES=label (default: retrieved from the store)");
  prompt_build->add_option("--image", image, "Image path referenced in the prompt");
  prompt_build->callback([&] {
    const auto eng = engine();
    cr::PromptSpec spec;
    spec.task_text = eng.catalog().text(task);
    spec.molecule_smiles = smiles;
    (void)cr::parse_smiles(smiles);
    if (!fewshot_args.empty()) {
      for (const auto& a : fewshot_args) spec.fewshot.push_back(parse_fewshot_arg(a));
    } else {
      spec.fewshot = eng.retrieve_fewshot(smiles, task);
    }
    if (!image.empty()) spec.image_path = image;
    std::cout << cr::build_prompt(spec);
  });

  // depict
  std::string output;
  auto* depict = app.add_subcommand("depict", "2D SVG depiction");
  depict->add_option("smiles", smiles)->required();
  depict->add_option("-o,--output", output, "SVG file (default stdout)");
  depict->callback([&] { write_output(output, cr::depict_svg(cr::parse_smiles(smiles))); });

  // reward
  auto* reward = app.add_subcommand("reward", "Score a response");
  reward->require_subcommand(1);
  std::string label_arg, response_file, request_file, id_arg;
  std::optional<double> l1, l2, l3;
  auto* reward_eval = reward->add_subcommand("eval", "Reward breakdown for one response");
  reward_eval->add_option("--molecule", smiles);
  reward_eval->add_option("--label", label_arg);
  reward_eval->add_option("--response-file", response_file, "Response text ('-' for stdin)");
  reward_eval->add_option("--task", task, "Task id for store retrieval");
  reward_eval->add_option("--fewshot", fewshot_args, "SMILES=label");
  reward_eval->add_option("--lambda1", l1);
  reward_eval->add_option("--lambda2", l2);
  reward_eval->add_option("--lambda3", l3);
  reward_eval->add_option("--id", id_arg, "Echoed as a JSON string");
  reward_eval->add_option("--request-json", request_file, "File of protocol request lines instead of flags");
  reward_eval->callback([&] {
    const auto eng = engine();
    if (!request_file.empty()) {
      const auto body = read_input(request_file);
      std::cout << cr::handle_batch(eng, body, cr::BatchKind::Reward, eng.config().threads);
      return;
    }
    if (smiles.empty() || label_arg.empty() || response_file.empty()) {
      throw CLI::ValidationError("reward eval", "--molecule, --label and --response-file are required");
    }
    cr::RewardRequest req;
    req.molecule = smiles;
    req.label = parse_label_arg(label_arg);
    req.response_text = read_input(response_file);
    if (!fewshot_args.empty()) {
      for (const auto& a : fewshot_args) req.fewshot.push_back(parse_fewshot_arg(a));
    } else {
      req.fewshot = eng.retrieve_fewshot(smiles, task);
    }
    if (l1 || l2 || l3) {
      cr::RewardWeights w = eng.reward_config().weights;
      if (l1) w.lambda1 = *l1;
      if (l2) w.lambda2 = *l2;
      if (l3) w.lambda3 = *l3;
      req.weights = w;
    }
    const auto id_json = id_arg.empty() ? std::string("null") : nlohmann::json(id_arg).dump();
    std::cout << cr::breakdown_line(id_json, cr::total_reward(req, eng.reward_config())) << '\n';
  });

  // grpo
  std::string input = "-";
  auto* grpo = app.add_subcommand("grpo", "Group-relative advantages");
  grpo->require_subcommand(1);
  auto* grpo_adv = grpo->add_subcommand("advantages", "Advantage request lines in, response lines out");
  grpo_adv->add_option("-i,--input", input, "JSON Lines ('-' for stdin)");
  grpo_adv->callback([&] {
    const auto body = read_input(input);
    const auto out = cr::handle_batch(cr::Engine(cr::EngineConfig{}), body, cr::BatchKind::Advantage);
    std::cout << out;
    if (out.find("\"error\":") != std::string::npos) status = 1;
  });

  // curate
  std::uint64_t seed = 0;
  auto* curate = app.add_subcommand("curate", "Teacher trajectory curation");
  curate->require_subcommand(1);
  auto* curate_filter = curate->add_subcommand("filter", "Drop malformed or wrong trajectories");
  curate_filter->add_option("-i,--input", input);
  curate_filter->add_option("-o,--output", output);
  curate_filter->callback([&] {
    auto result = cr::rejection_filter(cr::parse_trajectories_jsonl(read_input(input)));
    write_output(output, cr::trajectories_jsonl(result.accepted));
    ojson rep = {{"accepted", result.report.accepted},
                 {"format", result.report.format},
                 {"wrong_answer", result.report.wrong_answer}};
    std::cerr << rep.dump() << '\n';
  });
  auto run_export = [&](bool filter_first) {
    auto trajectories = cr::parse_trajectories_jsonl(read_input(input));
    cr::ExportMetadata meta;
    meta.seed = seed;
    meta.counts["input"] = trajectories.size();
    if (filter_first) {
      auto result = cr::rejection_filter(std::move(trajectories));
      meta.counts["rejected_format"] = result.report.format;
      meta.counts["rejected_wrong_answer"] = result.report.wrong_answer;
      trajectories = std::move(result.accepted);
    }
    const auto records = cr::select_one_per_instance(trajectories, seed);
    meta.counts["selected"] = records.size();
    if (output.empty() || output == "-") {
      std::cout << cr::sft_jsonl(records, meta);
    } else {
      cr::export_sft(records, meta, output);
    }
  };
  auto* curate_select = curate->add_subcommand("select", "One accepted trajectory per prompt, as SFT JSONL");
  curate_select->add_option("-i,--input", input);
  curate_select->add_option("-o,--output", output);
  curate_select->add_option("--seed", seed);
  curate_select->callback([&] { run_export(false); });
  auto* curate_export = curate->add_subcommand("export", "Filter, select and write SFT JSONL");
  curate_export->add_option("-i,--input", input);
  curate_export->add_option("-o,--output", output);
  curate_export->add_option("--seed", seed);
  curate_export->callback([&] { run_export(true); });

  // dataset
  auto* dataset = app.add_subcommand("dataset", "Labelled dataset ingestion and sampling");
  dataset->require_subcommand(1);
  std::size_t sample_n = 0;
  auto* dataset_ingest = dataset->add_subcommand("ingest", "Validate a CSV and print provenance");
  dataset_ingest->add_option("input", input)->required();
  dataset_ingest->add_option("--task", task)->required();
  dataset_ingest->add_option("--smiles-column", smiles_column);
  dataset_ingest->add_option("--label-column", label_column);
  dataset_ingest->add_option("-o,--output", output, "Normalised CSV");
  dataset_ingest->callback([&] {
    const auto table = cr::ingest_dataset(input, task, {smiles_column, label_column});
    if (!output.empty()) write_output(output, cr::dataset_csv(table));
    const auto& p = table.provenance;
    ojson out = {{"source", p.source},     {"rows_read", p.rows_read}, {"accepted", table.rows.size()},
                 {"skipped", p.skipped},   {"skipped_reasons", p.skipped_reasons},
                 {"content_hash", p.content_hash}};
    std::cout << out.dump() << '\n';
  });
  auto* dataset_sample = dataset->add_subcommand("sample", "Stratified seeded subset of TASK=path.csv inputs");
  dataset_sample->add_option("inputs", store_inputs)->required();
  dataset_sample->add_option("-n", sample_n)->required();
  dataset_sample->add_option("--seed", seed);
  dataset_sample->add_option("-o,--output", output);
  dataset_sample->callback([&] {
    std::vector<cr::DatasetTable> tables;
    for (const auto& spec : store_inputs) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos) throw cr::Error("invalid_argument", "expected TASK=path.csv, got " + spec);
      tables.push_back(cr::ingest_dataset(spec.substr(eq + 1), spec.substr(0, eq), {smiles_column, label_column}));
    }
    write_output(output, cr::dataset_csv(cr::sample_training_subset(tables, sample_n, seed)));
  });

  // auc
  auto* auc = app.add_subcommand("auc", "ROC-AUC of a predictions CSV");
  auc->add_option("-i,--input", input, "CSV with id,label,score|answer");
  auc->callback([&] {
    const auto preds = cr::parse_predictions_csv(read_input(input));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", cr::roc_auc(preds));
    std::cout << buf << '\n';
  });

  // audit
  std::string fixtures = std::string(CHEMREWARD_DEFAULT_TABLE_DIR);
  auto* audit = app.add_subcommand("audit", "Recompute averages of transcribed result tables");
  audit->add_option("--fixtures", fixtures, "Directory of table CSVs");
  audit->callback([&] {
    const auto tables = cr::load_published_tables(fixtures);
    const auto report = cr::audit_tables(tables);
    std::cout << report.to_text();
    if (report.mismatches() > 0) status = 2;
  });

  // serve
  bool use_stdio = false, use_http = false;
  auto* serve = app.add_subcommand("serve", "Answer protocol requests");
  auto* stdio_flag = serve->add_flag("--stdio", use_stdio, "JSON Lines on stdin/stdout");
  serve->add_flag("--http", use_http, "HTTP on the configured bind address")->excludes(stdio_flag);
  serve->callback([&] {
    const auto eng = engine();
    if (!use_http) {
      cr::serve_stream(eng, std::cin, std::cout);
      return;
    }
    cr::HttpService service(eng);
    const auto addr = cr::parse_bind_address(eng.config().bind_address);
    const int port = service.bind(addr);
    std::cerr << "listening on " << addr.host << ':' << port << std::endl;
    service.run();
  });

  // config
  auto* config = app.add_subcommand("config", "Engine configuration");
  config->require_subcommand(1);
  config->add_subcommand("dump", "Print the resolved configuration")->callback([&] {
    const auto cfg = cr::EngineConfig::resolve(config_path);
    cfg.validate();
    std::cout << cfg.dump();
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const cr::SmilesError& e) {
    std::cerr << ojson{{"error", smiles_error_json(e)}}.dump() << '\n';
    return 1;
  } catch (const cr::Error& e) {
    std::cerr << ojson{{"error", {{"code", e.code()}, {"message", e.what()}}}}.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << ojson{{"error", {{"code", "internal_error"}, {"message", e.what()}}}}.dump() << '\n';
    return 1;
  }
  return status;
}
