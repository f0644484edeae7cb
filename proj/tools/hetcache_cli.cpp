// hetcache command-line front end.
//
// Every option can also come from a JSON --config file whose keys are the
// long option names; flags given on the command line win. The effective
// configuration is echoed into every output.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hetcache/hetcache.hpp"
#include "hetcache/serialize.hpp"

using namespace hetcache;

namespace {

enum class Kind { Flag, Int, UInt, Real, Text, RealList, IntList };

struct OptSpec {
  std::string name;
  Kind kind;
  std::string help;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  json result;
  Table table;
};

std::size_t g_threads = 0;  // worker threads; results do not depend on it

[[noreturn]] void config_error(const std::string& msg) { fail(ErrorKind::ConfigError, msg); }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& name, const std::string& s) {
  std::istringstream is(s);
  T v{};
  is >> v;
  if (is.fail() || !is.eof()) config_error("option '" + name + "' expects a number, got '" + s + "'");
  return v;
}

json parse_text_value(const OptSpec& spec, const std::string& s) {
  switch (spec.kind) {
    case Kind::Flag: return true;
    case Kind::Int: return parse_number<std::int64_t>(spec.name, s);
    case Kind::UInt:
      if (!s.empty() && s[0] == '-') config_error("option '" + spec.name + "' must be non-negative");
      return parse_number<std::uint64_t>(spec.name, s);
    case Kind::Real: return parse_number<double>(spec.name, s);
    case Kind::Text: return s;
    case Kind::RealList: {
      json a = json::array();
      for (const auto& item : split_list(s)) a.push_back(parse_number<double>(spec.name, item));
      return a;
    }
    case Kind::IntList: {
      json a = json::array();
      for (const auto& item : split_list(s)) a.push_back(parse_number<std::int64_t>(spec.name, item));
      return a;
    }
  }
  return nullptr;
}

// Normalizes a config-file value to the option's type.
json check_config_value(const OptSpec& spec, const json& v) {
  auto bad = [&] { config_error("config key '" + spec.name + "' has the wrong type"); };
  switch (spec.kind) {
    case Kind::Flag:
      if (!v.is_boolean()) bad();
      return v;
    case Kind::Int:
      if (!v.is_number_integer()) bad();
      return v;
    case Kind::UInt:
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) bad();
      return v.get<std::uint64_t>();
    case Kind::Real:
      if (!v.is_number()) bad();
      return v.get<double>();
    case Kind::Text:
      if (!v.is_string()) bad();
      return v;
    case Kind::RealList:
    case Kind::IntList: {
      if (v.is_string()) return parse_text_value(spec, v.get<std::string>());
      if (!v.is_array()) bad();
      json a = json::array();
      for (const auto& e : v) {
        if (spec.kind == Kind::IntList ? !e.is_number_integer() : !e.is_number()) bad();
        a.push_back(spec.kind == Kind::IntList ? json(e.get<std::int64_t>()) : json(e.get<double>()));
      }
      return a;
    }
  }
  return v;
}

const std::vector<OptSpec> kGlobalOpts = {
    {"json", Kind::Flag, "emit JSON"},
    {"csv", Kind::Flag, "emit CSV"},
    {"out", Kind::Text, "write output to this path instead of stdout"},
    {"seed", Kind::UInt, "master random seed (default 1)"},
};

const std::vector<OptSpec> kInstanceOpts = {
    {"sizes", Kind::RealList, "cache sizes M_1,...,M_K in content units"},
    {"sizes-file", Kind::Text, "JSON file with a cache set or problem instance"},
    {"n", Kind::Int, "catalog size N"},
};

std::vector<OptSpec> with_instance(std::vector<OptSpec> extra) {
  std::vector<OptSpec> out = kInstanceOpts;
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<OptSpec> opts;
};

const std::vector<CommandSpec>& commands() {
  static const std::vector<CommandSpec> cmds = {
      {"traffic", "delivery rate of the zero-padding scheme by every method", with_instance({})},
      {"bound", "cut-set lower bound",
       with_instance({{"homogenized", Kind::Flag, "also compare against the equal-size cache set"}})},
      {"simulate", "bit-level placement, delivery and decoding",
       with_instance({{"f", Kind::UInt, "file size in bits (default 100000)"},
                      {"demands", Kind::IntList, "requested content per user, 1-based"},
                      {"worst-case", Kind::Flag, "search all demand vectors for the largest rate"},
                      {"no-dedup", Kind::Flag, "send repeated-demand transmissions separately"},
                      {"placement", Kind::Text, "exact or bernoulli (default exact)"},
                      {"transcript", Kind::Text, "write the transcript audit JSON here"},
                      {"dump", Kind::Text, "write the raw payload dump here"}})},
      {"oracle", "optimality check of zero padding on small instances", with_instance({})},
      {"gcd", "group coded delivery against joint delivery",
       with_instance({{"l", Kind::Int, "number of groups"},
                      {"l-grid", Kind::IntList, "list of group counts"},
                      {"k", Kind::Int, "users (sampled mode)"},
                      {"mu", Kind::Real, "mean cache size (sampled mode)"},
                      {"sigma-ratios", Kind::RealList, "sigma/mu values (sampled mode)"},
                      {"trials", Kind::UInt, "Monte Carlo trials (default 1000)"}})},
      {"sweep", "Monte Carlo parameter sweep",
       {{"experiment", Kind::Text, "gap_vs_mu, gap_vs_sigma, gap_vs_scale or gcd_vs_L"},
        {"n", Kind::Int, "catalog size N"},
        {"k", Kind::Int, "number of users K"},
        {"mu", Kind::Real, "mean cache size"},
        {"mu-ratio", Kind::Real, "gap_vs_scale: mu as a fraction of N"},
        {"mu-grid", Kind::RealList, "gap_vs_mu grid"},
        {"sigma-ratios", Kind::RealList, "sigma/mu grid"},
        {"n-grid", Kind::IntList, "gap_vs_scale N grid"},
        {"k-grid", Kind::IntList, "gap_vs_scale K grid paired with the N grid"},
        {"l-grid", Kind::IntList, "gcd_vs_L group counts"},
        {"trials", Kind::UInt, "Monte Carlo trials per point (default 1000)"},
        {"include-uncoded", Kind::Flag, "add uncoded-baseline rows"}}},
  };
  return cmds;
}

// ---------------------------------------------------------------------------
// Effective configuration access

struct Config {
  json values = json::object();

  bool has(const std::string& k) const { return values.contains(k); }
  bool flag(const std::string& k) const { return has(k) && values.at(k).get<bool>(); }
  template <class T>
  T get(const std::string& k) const {
    if (!has(k)) config_error("missing required option --" + k);
    return values.at(k).get<T>();
  }
  template <class T>
  T get_or(const std::string& k, T fallback) {
    if (!has(k)) values[k] = fallback;
    return values.at(k).get<T>();
  }
};

std::string num(double v) { return format_number(v); }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    config_error("'" + path + "' is not valid JSON: " + e.what());
  }
}

CacheSet load_cache_set(Config& cfg) {
  if (cfg.has("sizes-file")) {
    json j = read_json_file(cfg.get<std::string>("sizes-file"));
    try {
      if (j.contains("cache_set")) return problem_instance_from_json(j).cache_set;
      if (!j.contains("catalog_size") && cfg.has("n")) j["catalog_size"] = cfg.get<std::int64_t>("n");
      return cache_set_from_json(j);
    } catch (const json::exception& e) {
      config_error(std::string("malformed sizes file: ") + e.what());
    }
  }
  const auto sizes = cfg.get<std::vector<double>>("sizes");
  if (!std::is_sorted(sizes.begin(), sizes.end()))
    std::cerr << "warning: cache sizes were not in ascending order; sorted\n";
  return new_cache_set(sizes, cfg.get<std::int64_t>("n"));
}

// ---------------------------------------------------------------------------
// Commands

Report cmd_traffic(Config& cfg) {
  const CacheSet cs = load_cache_set(cfg);
  std::vector<TrafficReport> reports{traffic_closed_form(cs)};
  if (cs.num_users() <= kSummationMaxUsers) reports.push_back(traffic_summation(cs));
  if (cs.num_users() <= kEnumerationMaxUsers) reports.push_back(traffic_subset_enumeration(cs));
  reports.push_back(traffic_uncoded(cs));

  Report r;
  r.result["cache_set"] = cs;
  json rates = json::object();
  for (const auto& t : reports) rates[std::string(to_string(t.method))] = t.rate;
  r.result["rates"] = rates;
  json deltas = json::array();
  for (std::size_t i = 0; i < reports.size(); ++i)
    for (std::size_t j = i + 1; j < reports.size(); ++j)
      deltas.push_back({{"a", to_string(reports[i].method)},
                        {"b", to_string(reports[j].method)},
                        {"delta", reports[i].rate - reports[j].rate}});
  r.result["deltas"] = deltas;
  r.result["fingerprint"] = cs.fingerprint();
  r.table.header = {"method", "rate"};
  for (const auto& t : reports) r.table.rows.push_back({std::string(to_string(t.method)), num(t.rate)});
  return r;
}

Report cmd_bound(Config& cfg) {
  const CacheSet cs = load_cache_set(cfg);
  const BoundReport b = cutset_bound(cs);
  Report r;
  r.result["cache_set"] = cs;
  r.result["bound"] = b;
  r.result["critical_s_condition"] = cutset_critical_s(cs);
  if (cfg.flag("homogenized")) {
    const double h = cutset_bound(homogenize(cs)).rate;
    r.result["homogenized_rate"] = h;
    r.result["homogenized_le_bound"] = h <= b.rate + 1e-12;
  }
  r.table.header = {"s", "value", "is_max"};
  for (std::size_t s = 0; s < b.per_s_values.size(); ++s)
    r.table.rows.push_back({std::to_string(s + 1), num(b.per_s_values[s]), s + 1 == b.critical_s ? "1" : "0"});
  return r;
}

Report cmd_simulate(Config& cfg) {
  const CacheSet cs = load_cache_set(cfg);
  const auto f = cfg.get_or<std::uint64_t>("f", 100000);
  const auto seed = cfg.get<std::uint64_t>("seed");
  const auto mode_name = cfg.get_or<std::string>("placement", "exact");
  if (mode_name != "exact" && mode_name != "bernoulli") config_error("placement must be exact or bernoulli");
  const bool dedup = !cfg.flag("no-dedup");
  const PlacementState p = place(ProblemInstance(cs), static_cast<std::size_t>(f), seed,
                                 mode_name == "exact" ? PlacementMode::ExactCount : PlacementMode::Bernoulli, g_threads);
  const std::size_t k = cs.num_users();
  const auto n = static_cast<std::size_t>(cs.catalog_size());

  DemandVector d;
  if (cfg.flag("worst-case")) {
    if (cfg.has("demands")) config_error("--demands and --worst-case are exclusive");
    d = worst_case_search(p, dedup).demands;
  } else if (cfg.has("demands")) {
    d = json{{"demands", cfg.values.at("demands")}}.get<DemandVector>();
  } else {
    for (std::size_t u = 0; u < k; ++u) d.demands.push_back(u % n);
  }
  d.validate(k, cs.catalog_size());

  const Transcript t = deliver(p, d, dedup);
  decode(p, t, d);  // throws DecodeFailure
  const double measured = measured_rate(t);
  const double analytic = traffic_closed_form(cs).rate;

  if (cfg.has("transcript")) {
    json audit = t;
    std::ofstream out(cfg.get<std::string>("transcript"));
    if (!out) config_error("cannot write transcript file");
    out << audit.dump(2) << '\n';
  }
  if (cfg.has("dump")) {
    std::ofstream out(cfg.get<std::string>("dump"), std::ios::binary);
    if (!out) config_error("cannot write dump file");
    write_payload_dump(out, t, k);
  }

  Report r;
  r.result["cache_set"] = cs;
  r.result["demands"] = d;
  r.result["file_size_bits"] = f;
  r.result["measured_rate"] = measured;
  r.result["analytic_rate"] = analytic;
  r.result["delta"] = measured - analytic;
  r.result["total_bits"] = t.total_bits;
  r.result["num_transmissions"] = t.transmissions.size();
  r.result["decode_ok"] = true;
  r.result["worst_case"] = cfg.flag("worst-case");
  r.table.header = {"measured_rate", "analytic_rate", "delta", "total_bits", "num_transmissions", "decode_ok"};
  r.table.rows.push_back({num(measured), num(analytic), num(measured - analytic), std::to_string(t.total_bits),
                          std::to_string(t.transmissions.size()), "1"});
  return r;
}

Report cmd_oracle(Config& cfg) {
  const CacheSet cs = load_cache_set(cfg);
  const double optimal = exhaustive_optimal_rate(cs);
  const double zero = traffic_closed_form(cs).rate;
  Report r;
  r.result["cache_set"] = cs;
  r.result["optimal_rate"] = optimal;
  r.result["zero_padding_rate"] = zero;
  r.result["zero_padding_optimal"] = std::abs(optimal - zero) <= kTheorem2Tolerance;
  if (cs.num_users() == 3) {
    const PaddingLedger ledger = useful_padding_deliver(cs);
    r.result["ledger"] = ledger;
    r.table.header = {"index", "zero_padding", "useful_padding", "zero_length", "useful_length", "borrowed_in",
                      "borrowed_out"};
    for (const auto& row : ledger.rows)
      r.table.rows.push_back({std::to_string(row.index), row.zero_padding, row.useful_padding, num(row.zero_length),
                              num(row.useful_length), num(row.borrowed_in), num(row.borrowed_out)});
  } else {
    r.table.header = {"optimal_rate", "zero_padding_rate", "zero_padding_optimal"};
    r.table.rows.push_back({num(optimal), num(zero), r.result["zero_padding_optimal"].get<bool>() ? "1" : "0"});
  }
  return r;
}

std::vector<std::int64_t> group_counts(Config& cfg) {
  if (cfg.has("l-grid")) return cfg.get<std::vector<std::int64_t>>("l-grid");
  return {cfg.get_or<std::int64_t>("l", 2)};
}

Report sweep_report(const std::vector<SweepRow>& rows) {
  Report r;
  r.result["rows"] = rows;
  r.table.header = split_list(std::string(kSweepCsvHeader));
  for (const auto& row : rows) {
    std::vector<std::string> cells;
    std::string line = to_csv_line(row), cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    r.table.rows.push_back(cells);
  }
  return r;
}

Report cmd_gcd(Config& cfg) {
  const bool sampled = !cfg.has("sizes") && !cfg.has("sizes-file");
  if (sampled) {
    SweepConfig sc;
    sc.experiment = SweepExperiment::GcdVsL;
    sc.n = cfg.get<std::int64_t>("n");
    sc.k = cfg.get<std::int64_t>("k");
    sc.mu = cfg.get<double>("mu");
    sc.sigma_ratios = cfg.get<std::vector<double>>("sigma-ratios");
    sc.l_grid = group_counts(cfg);
    sc.trials = cfg.get_or<std::uint64_t>("trials", 1000);
    sc.seed = cfg.get<std::uint64_t>("seed");
    return sweep_report(sweep(sc, g_threads));
  }
  const CacheSet cs = load_cache_set(cfg);
  double sd = 0.0;
  for (double m : cs.sizes()) sd += (m - cs.mean()) * (m - cs.mean());
  sd = std::sqrt(sd / static_cast<double>(cs.num_users()));
  Report r;
  r.result["cache_set"] = cs;
  json rows = json::array();
  r.table.header = {"L", "gcd_total", "joint_rate", "increment_ratio", "bound"};
  for (auto l : group_counts(cfg)) {
    if (l < 1 || static_cast<std::size_t>(l) > cs.num_users()) config_error("every L must lie in [1, K]");
    const GcdReport g = gcd_traffic(cs, partition_contiguous(cs.num_users(), static_cast<std::size_t>(l)));
    const double bound =
        theorem6_bound(cs.mean(), sd, cs.catalog_size(), static_cast<std::int64_t>(cs.num_users()), l);
    json row = g;
    row["L"] = l;
    row["bound"] = bound;
    rows.push_back(row);
    r.table.rows.push_back(
        {std::to_string(l), num(g.gcd_total), num(g.joint_rate), num(g.increment_ratio), num(bound)});
  }
  r.result["groupings"] = rows;
  return r;
}

Report cmd_sweep(Config& cfg) {
  SweepConfig sc;
  sc.experiment = parse_experiment(cfg.get<std::string>("experiment"));
  if (cfg.has("n")) sc.n = cfg.get<std::int64_t>("n");
  if (cfg.has("k")) sc.k = cfg.get<std::int64_t>("k");
  if (cfg.has("mu")) sc.mu = cfg.get<double>("mu");
  if (cfg.has("mu-ratio")) sc.mu_ratio = cfg.get<double>("mu-ratio");
  if (cfg.has("mu-grid")) sc.mu_grid = cfg.get<std::vector<double>>("mu-grid");
  if (cfg.has("sigma-ratios")) sc.sigma_ratios = cfg.get<std::vector<double>>("sigma-ratios");
  if (cfg.has("n-grid")) sc.n_grid = cfg.get<std::vector<std::int64_t>>("n-grid");
  if (cfg.has("k-grid")) sc.k_grid = cfg.get<std::vector<std::int64_t>>("k-grid");
  if (cfg.has("l-grid")) sc.l_grid = cfg.get<std::vector<std::int64_t>>("l-grid");
  sc.trials = cfg.get_or<std::uint64_t>("trials", 1000);
  sc.seed = cfg.get<std::uint64_t>("seed");
  sc.include_uncoded = cfg.flag("include-uncoded");
  return sweep_report(sweep(sc, g_threads));
}

using Handler = std::function<Report(Config&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {{"traffic", cmd_traffic}, {"bound", cmd_bound},
                                                   {"simulate", cmd_simulate}, {"oracle", cmd_oracle},
                                                   {"gcd", cmd_gcd},         {"sweep", cmd_sweep}};
  return h;
}

// ---------------------------------------------------------------------------
// Rendering

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string render_csv(const std::string& command, const json& config, const Table& t) {
  std::string out = "# " + command + " " + config.dump() + "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_cell(cells[i]);
    out += '\n';
  };
  line(t.header);
  for (const auto& row : t.rows) line(row);
  return out;
}

// Display width of UTF-8 text (continuation bytes take no column).
std::size_t columns(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

std::string scalar_text(const json& v) {
  if (v.is_number_float()) return num(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string render_text(const std::string& command, const json& config, const json& result, const Table& t) {
  std::ostringstream os;
  os << "command: " << command << "\nconfig: " << config.dump() << '\n';
  for (auto it = result.begin(); it != result.end(); ++it) {
    const json& v = it.value();
    if (v.is_object() && it.key() == "rates") {
      for (auto r = v.begin(); r != v.end(); ++r) os << r.key() << ": " << scalar_text(r.value()) << '\n';
    } else if (!v.is_structured()) {
      os << it.key() << ": " << scalar_text(v) << '\n';
    }
  }
  std::vector<std::size_t> width(t.header.size(), 0);
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    width[i] = columns(t.header[i]);
    for (const auto& row : t.rows) width[i] = std::max(width[i], columns(row[i]));
  }
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      os << (i ? "  " : "") << cells[i];
      if (i + 1 < cells.size()) os << std::string(width[i] - columns(cells[i]), ' ');
    }
    os << '\n';
  };
  os << '\n';
  line(t.header);
  for (const auto& row : t.rows) line(row);
  return os.str();
}

// ---------------------------------------------------------------------------

struct Bound {
  const OptSpec* spec;
  CLI::Option* opt;
  std::string text;
  bool flag = false;
};

int run(int argc, char** argv) {
  CLI::App app{"Coded caching with heterogeneous cache sizes"};
  app.require_subcommand(0, 1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::vector<std::unique_ptr<Bound>> globals;
  for (const auto& spec : kGlobalOpts) {
    auto b = std::make_unique<Bound>();
    b->spec = &spec;
    b->opt = spec.kind == Kind::Flag ? app.add_flag("--" + spec.name, b->flag, spec.help)
                                     : app.add_option("--" + spec.name, b->text, spec.help);
    globals.push_back(std::move(b));
  }
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with option values");
  app.add_option("--threads", g_threads, "worker threads (0 = all cores); does not affect results");

  std::map<std::string, std::pair<CLI::App*, std::vector<std::unique_ptr<Bound>>>> subs;
  for (const auto& cmd : commands()) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->fallthrough();
    auto& bounds = subs[cmd.name];
    bounds.first = sub;
    for (const auto& spec : cmd.opts) {
      auto b = std::make_unique<Bound>();
      b->spec = &spec;
      b->opt = spec.kind == Kind::Flag ? sub->add_flag("--" + spec.name, b->flag, spec.help)
                                       : sub->add_option("--" + spec.name, b->text, spec.help);
      bounds.second.push_back(std::move(b));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  json file_cfg = json::object();
  if (!config_path.empty()) {
    file_cfg = read_json_file(config_path);
    if (!file_cfg.is_object()) config_error("config file must hold a JSON object");
  }

  std::string command;
  for (const auto& [name, entry] : subs)
    if (entry.first->parsed()) command = name;
  if (command.empty()) {
    if (!file_cfg.contains("command")) {
      std::cerr << app.help();
      return 2;
    }
    command = file_cfg.at("command").get<std::string>();
    if (!subs.count(command)) config_error("unknown command '" + command + "' in config");
  } else if (file_cfg.contains("command") && file_cfg.at("command") != command) {
    config_error("config file is for command '" + file_cfg.at("command").get<std::string>() + "'");
  }

  auto& bounds = subs.at(command).second;
  std::map<std::string, const Bound*> by_name;
  for (const auto& b : globals) by_name[b->spec->name] = b.get();
  for (const auto& b : bounds) by_name[b->spec->name] = b.get();

  Config cfg;
  for (auto it = file_cfg.begin(); it != file_cfg.end(); ++it) {
    if (it.key() == "command") continue;
    auto found = by_name.find(it.key());
    if (found == by_name.end()) config_error("unknown config key '" + it.key() + "' for command '" + command + "'");
    cfg.values[it.key()] = check_config_value(*found->second->spec, it.value());
  }
  for (const auto& [name, b] : by_name)
    if (b->opt->count() > 0) cfg.values[name] = b->spec->kind == Kind::Flag ? json(b->flag) : parse_text_value(*b->spec, b->text);
  cfg.get_or<std::uint64_t>("seed", 1);

  const bool as_json = cfg.flag("json");
  const bool as_csv = cfg.flag("csv");
  if (as_json && as_csv) config_error("--json and --csv are exclusive");
  const std::string out_path = cfg.has("out") ? cfg.get<std::string>("out") : std::string();

  Report report = handlers().at(command)(cfg);

  // the echo reflects defaults filled in by the command
  json echo = cfg.values;
  for (const char* k : {"json", "csv", "out"}) echo.erase(k);
  json result = report.result;
  round_numbers(echo);
  round_numbers(result);

  std::string text;
  if (as_json) {
    json doc = {{"command", command}, {"config", echo}, {"result", result}};
    text = doc.dump(2) + "\n";
  } else if (as_csv) {
    text = render_csv(command, echo, report.table);
  } else {
    text = render_text(command, echo, result, report.table);
  }

  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) config_error("cannot write '" + out_path + "'");
    out << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::ConfigError ? 2 : 1;
  } catch (const json::exception& e) {
    std::cerr << "error: ConfigError: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
