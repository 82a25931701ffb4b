#include "qct/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "qct/keyrate.hpp"
#include "qct/shots.hpp"

namespace qct::cli {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Rows

const std::vector<std::string>& columns() {
  static const std::vector<std::string> names = {
      "model", "n",     "j",     "h",   "basis",       "a",       "observable", "noise_kind",
      "noise_site", "p", "alpha", "xi",  "eta",        "theta",   "delta_exact", "n_shots",
      "mean",  "sem",   "e_bit", "e_ph", "k_asym",     "seed"};
  return names;
}

std::string format_number(double value) {
  if (!std::isfinite(value)) return {};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

template <typename T>
std::string cell(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_same_v<T, double>)
    return format_number(*v);
  else if constexpr (std::is_same_v<T, std::string>)
    return *v;
  else
    return std::to_string(*v);
}

std::vector<std::string> cells(const ResultRow& r) {
  return {r.model,          std::to_string(r.n), format_number(r.j), format_number(r.h),
          r.basis,          cell(r.a),           r.observable,       cell(r.noise_kind),
          cell(r.noise_site), cell(r.p),         cell(r.alpha),      cell(r.xi),
          cell(r.eta),      cell(r.theta),       cell(r.delta_exact), cell(r.n_shots),
          cell(r.mean),     cell(r.sem),         cell(r.e_bit),      cell(r.e_ph),
          cell(r.k_asym),   cell(r.seed)};
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("cannot parse " + what + " '" + s + "' as a number");
  }
  if (used != s.size()) throw ValidationError("cannot parse " + what + " '" + s + "' as a number");
  return v;
}

long long parse_int(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("cannot parse " + what + " '" + s + "' as an integer");
  }
  if (used != s.size()) throw ValidationError("cannot parse " + what + " '" + s + "' as an integer");
  return v;
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  if (s.empty() || s[0] == '-') throw ValidationError(what + " must be a non-negative integer");
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("cannot parse " + what + " '" + s + "' as an integer");
  }
  if (used != s.size()) throw ValidationError("cannot parse " + what + " '" + s + "' as an integer");
  return v;
}

ResultRow row_from_cells(const std::vector<std::string>& c) {
  if (c.size() != columns().size())
    throw ValidationError("csv row has " + std::to_string(c.size()) + " cells, expected " +
                          std::to_string(columns().size()));
  auto opt_d = [&](std::size_t i) -> std::optional<double> {
    if (c[i].empty()) return std::nullopt;
    return parse_double(c[i], columns()[i]);
  };
  auto opt_i = [&](std::size_t i) -> std::optional<long long> {
    if (c[i].empty()) return std::nullopt;
    return parse_int(c[i], columns()[i]);
  };
  ResultRow r;
  r.model = c[0];
  r.n = static_cast<int>(parse_int(c[1], "n"));
  r.j = parse_double(c[2], "j");
  r.h = parse_double(c[3], "h");
  r.basis = c[4];
  if (auto v = opt_i(5)) r.a = static_cast<int>(*v);
  r.observable = c[6];
  if (!c[7].empty()) r.noise_kind = c[7];
  if (auto v = opt_i(8)) r.noise_site = static_cast<int>(*v);
  r.p = opt_d(9);
  r.alpha = opt_d(10);
  r.xi = opt_d(11);
  r.eta = opt_d(12);
  r.theta = opt_d(13);
  r.delta_exact = opt_d(14);
  r.n_shots = opt_i(15);
  r.mean = opt_d(16);
  r.sem = opt_d(17);
  r.e_bit = opt_d(18);
  r.e_ph = opt_d(19);
  r.k_asym = opt_d(20);
  if (!c[21].empty()) r.seed = parse_u64(c[21], "seed");
  return r;
}

// RFC-4180 records; accepts LF or CRLF.
std::vector<std::vector<std::string>> split_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\r') {
      continue;
    } else if (ch == '\n') {
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      any = false;
    } else {
      field += ch;
      any = true;
    }
  }
  if (quoted) throw ValidationError("csv: unterminated quoted field");
  if (any || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out;
  const auto& names = columns();
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
  out += "\n";
  for (const auto& r : rows) {
    const auto c = cells(r);
    for (std::size_t i = 0; i < c.size(); ++i) out += (i ? "," : "") + quote(c[i]);
    out += "\n";
  }
  return out;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  const auto records = split_csv(text);
  if (records.empty()) throw ValidationError("csv: missing header");
  if (records.front() != columns()) throw ValidationError("csv: header does not match the row schema");
  std::vector<ResultRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) rows.push_back(row_from_cells(records[i]));
  return rows;
}

std::string to_json(const std::vector<ResultRow>& rows, const std::string& config_json) {
  ordered_json doc;
  doc["config"] = config_json.empty() ? ordered_json::object() : ordered_json::parse(config_json);
  ordered_json list = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json o;
    const auto c = cells(r);
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::string& name = columns()[i];
      if (c[i].empty()) {
        o[name] = nullptr;
      } else if (name == "model" || name == "basis" || name == "observable" || name == "noise_kind") {
        o[name] = c[i];
      } else if (name == "seed") {
        o[name] = *r.seed;
      } else if (name == "n" || name == "a" || name == "noise_site" || name == "n_shots") {
        o[name] = parse_int(c[i], name);
      } else {
        // Shortest round-trip text is what the CSV carries too.
        o[name] = parse_double(c[i], name);
      }
    }
    list.push_back(std::move(o));
  }
  doc["rows"] = std::move(list);
  return doc.dump(2) + "\n";
}

std::vector<ResultRow> parse_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ValidationError(std::string("json: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("rows") || !doc["rows"].is_array())
    throw ValidationError("json: expected an object with a rows array");
  std::vector<ResultRow> rows;
  for (const auto& o : doc["rows"]) {
    std::vector<std::string> c;
    for (const auto& name : columns()) {
      if (!o.contains(name)) throw ValidationError("json: row lacks column " + name);
      const auto& v = o[name];
      if (v.is_null())
        c.emplace_back();
      else if (v.is_string())
        c.push_back(v.get<std::string>());
      else if (v.is_number_unsigned())
        c.push_back(std::to_string(v.get<std::uint64_t>()));
      else if (v.is_number_integer())
        c.push_back(std::to_string(v.get<long long>()));
      else if (v.is_number())
        c.push_back(format_number(v.get<double>()));
      else
        throw ValidationError("json: bad value for column " + name);
    }
    rows.push_back(row_from_cells(c));
  }
  return rows;
}

int thread_count() {
  if (const char* env = std::getenv("QCT_THREADS")) {
    const long long v = parse_int(env, "QCT_THREADS");
    if (v < 1) throw ValidationError("QCT_THREADS must be >= 1");
    return static_cast<int>(std::min<long long>(v, 256));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------
// Options

namespace {

struct Options {
  std::string command;
  std::string model = "star";
  int n = 1;
  double j = 1.0;
  double h = 1.0;
  std::string basis = "x";
  std::string observable = "charge";
  std::string a = "0";
  std::optional<double> theta;
  std::string format = "csv";
  std::string out;
  bool verify = false;
  std::string variable = "j";
  std::optional<double> start;
  std::optional<double> stop;
  std::optional<int> steps;
  std::string noise;
  std::string p;
  double alpha = 0.0;
  std::optional<long long> shots;
  std::uint64_t seed = 1;
  std::string trit = "block";
  int block_m = 1;
  std::vector<std::string> counts;
  std::string save_counts;
};

struct NoiseChoice {
  NoiseKind kind;
  std::optional<int> site;  // resolved against N
  std::string label;
};

std::optional<NoiseChoice> parse_noise(const std::string& name, int n) {
  if (name.empty()) return std::nullopt;
  if (name == "classical") return NoiseChoice{NoiseKind::ClassicalFlip, std::nullopt, name};
  if (name == "mixture") return NoiseChoice{NoiseKind::ExcitedMixture, std::nullopt, name};
  if (name == "superposition") return NoiseChoice{NoiseKind::ExcitedSuperposition, std::nullopt, name};
  if (name == "alice-bitflip") return NoiseChoice{NoiseKind::BitFlip, 0, name};
  if (name == "bob-bitflip") return NoiseChoice{NoiseKind::BitFlip, n, name};
  if (name == "alice-phaseflip") return NoiseChoice{NoiseKind::PhaseFlip, 0, name};
  if (name == "bob-phaseflip") return NoiseChoice{NoiseKind::PhaseFlip, n, name};
  throw ValidationError("unknown noise '" + name +
                        "' (expected classical|mixture|superposition|alice-bitflip|bob-bitflip|"
                        "alice-phaseflip|bob-phaseflip)");
}

// "0.1" or "start:stop:steps".
std::vector<double> parse_p(const std::string& text) {
  const auto first = text.find(':');
  if (first == std::string::npos) {
    const double p = parse_double(text, "p");
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p must be in [0, 1]");
    return {p};
  }
  const auto second = text.find(':', first + 1);
  if (second == std::string::npos) throw ValidationError("p grid must be start:stop:steps");
  const double start = parse_double(text.substr(0, first), "p start");
  const double stop = parse_double(text.substr(first + 1, second - first - 1), "p stop");
  const long long steps = parse_int(text.substr(second + 1), "p steps");
  if (start < 0.0 || stop > 1.0) throw ValidationError("p grid must lie in [0, 1]");
  if (steps < 2 || steps > 100000) throw ValidationError("p grid steps must be in [2, 100000]");
  return linspace(start, stop, static_cast<int>(steps));
}

std::vector<int> parse_a(const std::string& text) {
  if (text == "0") return {0};
  if (text == "1") return {1};
  if (text == "both") return {0, 1};
  throw ValidationError("a must be 0, 1 or both");
}

TritOptions parse_trit(const Options& o) {
  TritOptions t;
  if (o.trit == "reference")
    t.model = TritModel::ReferenceDifferencing;
  else if (o.trit == "block")
    t.model = TritModel::BlockAverage;
  else
    throw ValidationError("unknown trit model '" + o.trit + "' (expected reference|block)");
  if (o.block_m < 1) throw ValidationError("block-m must be >= 1");
  t.block_m = o.block_m;
  return t;
}

ordered_json provenance(const Options& o) {
  ordered_json c;
  c["command"] = o.command;
  c["model"] = o.model;
  c["n"] = o.n;
  c["j"] = o.j;
  c["h"] = o.h;
  c["basis"] = o.basis;
  c["observable"] = o.observable;
  c["a"] = o.a;
  c["theta"] = o.theta ? ordered_json(*o.theta) : ordered_json("optimal");
  c["format"] = o.format;
  c["verify"] = o.verify;
  if (o.command == "sweep") {
    c["variable"] = o.variable;
    if (o.start) c["start"] = *o.start;
    if (o.stop) c["stop"] = *o.stop;
    if (o.steps) c["steps"] = *o.steps;
  }
  c["noise"] = o.noise.empty() ? ordered_json(nullptr) : ordered_json(o.noise);
  c["p"] = o.p.empty() ? ordered_json(nullptr) : ordered_json(o.p);
  c["alpha"] = o.alpha;
  c["shots"] = o.shots ? ordered_json(*o.shots) : ordered_json(nullptr);
  c["seed"] = o.seed;
  if (o.command == "keyrate") {
    c["trit"] = o.trit;
    c["block_m"] = o.block_m;
  }
  if (!o.counts.empty()) c["counts"] = o.counts;
  c["threads"] = thread_count();
  return c;
}

// ---------------------------------------------------------------------------
// Point evaluation

struct Point {
  ProtocolConfig config;
  std::optional<NoiseSpec> noise;
  std::string noise_label;
  std::optional<long long> shots;
  std::uint64_t seed = 1;
  bool verify = false;
};

ResultRow base_row(const ProtocolConfig& c) {
  ResultRow r;
  r.model = to_string(c.spec.kind);
  r.n = c.spec.n;
  r.j = c.spec.j;
  r.h = c.spec.h;
  r.basis = to_string(c.basis);
  r.a = c.a;
  r.observable = to_string(c.observable);
  return r;
}

// Independent re-run of the density-matrix pipeline and the closed-form relation.
void verify_row(const Point& pt, const ResultRow& row) {
  const ProtocolConfig& c = pt.config;
  const ModelSpec& spec = c.spec;
  const Spectrum<double> spectrum = model_spectrum(spec);
  const Density rho_gs = density_from_state(ground_state(spectrum));
  const ProtocolPair pair = protocol_pair(spec, c.basis);
  const Op o = observable_operator(spec, c.observable);
  const double baseline = expectation(rho_gs, o);
  const double theta = *row.theta;
  const double tol = 1e-9 * std::max({1.0, std::abs(*row.xi), std::abs(*row.eta)});

  auto pipeline = [&](const Density& rho, int a) { return expectation(evolve(rho, pair, theta, a), o) - baseline; };
  double recomputed = 0.0;
  double closed = 0.0;
  if (!pt.noise) {
    recomputed = pipeline(rho_gs, c.a);
    closed = delta_closed_form(*row.xi, *row.eta, theta, c.a);
  } else if (pt.noise->kind == NoiseKind::ClassicalFlip) {
    const double p = pt.noise->p;
    recomputed = (1.0 - p) * pipeline(rho_gs, c.a) + p * pipeline(rho_gs, c.a ^ 1);
    closed = (1.0 - p) * delta_closed_form(*row.xi, *row.eta, theta, c.a) +
             p * delta_closed_form(*row.xi, *row.eta, theta, c.a ^ 1);
  } else {
    const Density rho = to_density(apply_resource_noise(*pt.noise, spectrum));
    recomputed = pipeline(rho, c.a);
    closed = delta_closed_form(*row.xi, *row.eta, theta, c.a) + expectation(rho, o) - baseline;
  }
  const double reported = *row.delta_exact;
  // Degenerate rows report δ = 0 with θ = 0, where the pipeline also gives 0.
  if (std::abs(reported - recomputed) > tol || std::abs(reported - closed) > tol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "verify failed: reported " << reported << ", pipeline " << recomputed << ", closed form " << closed;
    throw NumericalError(msg.str());
  }
}

struct ShotResult {
  ShotStats stats;
  double mean_shift = 0.0;
  std::vector<std::pair<std::string, ShotBatch>> batches;
};

ShotResult run_shots(const Point& pt, double baseline) {
  const ProtocolConfig& c = pt.config;
  const ModelSpec& spec = c.spec;
  Resource resource = model_ground_state(spec);
  double flip = 0.0;
  if (pt.noise) {
    if (pt.noise->kind == NoiseKind::ClassicalFlip)
      flip = pt.noise->p;
    else
      resource = apply_resource_noise(*pt.noise, model_spectrum(spec));
  }
  const long long n = *pt.shots;
  const std::uint64_t seed_z = pt.seed;
  const std::uint64_t seed_xx = mix64(pt.seed ^ 0x5851f42d4c957f2dULL);
  ShotResult out;
  auto one_term = [&](MeasuredBasis basis, double coeff, std::uint64_t seed) {
    ShotBatch b = sample_protocol(c, resource, n, seed, basis, flip);
    const double m = b.bob_mean();
    out.stats.n_shots = b.n_shots;
    out.stats.mean = coeff * m;
    out.stats.variance_single = coeff * coeff * std::max(0.0, 1.0 - m * m);
    out.stats.sem = std::sqrt(out.stats.variance_single / static_cast<double>(n));
    out.batches.emplace_back(to_string(basis), std::move(b));
  };
  switch (c.observable) {
    case ObservableKind::Charge: {
      ShotBatch b = sample_protocol(c, resource, n, seed_z, MeasuredBasis::Z, flip);
      out.stats = charge_stats(b);
      out.batches.emplace_back("Z", std::move(b));
      break;
    }
    case ObservableKind::Energy: {
      ShotBatch bz = sample_protocol(c, resource, n, seed_z, MeasuredBasis::Z, flip);
      ShotBatch bx = sample_protocol(c, resource, n, seed_xx, MeasuredBasis::XX, flip);
      out.stats = energy_stats(bz, bx, spec.h, spec.j);
      out.batches.emplace_back("Z", std::move(bz));
      out.batches.emplace_back("XX", std::move(bx));
      break;
    }
    case ObservableKind::EnergyComponentZ: one_term(MeasuredBasis::Z, spec.h, seed_z); break;
    case ObservableKind::EnergyComponentXX: one_term(MeasuredBasis::XX, spec.j, seed_xx); break;
  }
  out.mean_shift = out.stats.mean - baseline;
  return out;
}

ResultRow evaluate(const Point& pt, std::vector<std::pair<std::string, ShotBatch>>* batches = nullptr) {
  ResultRow row = base_row(pt.config);
  double baseline = 0.0;
  if (pt.noise) {
    const NoisyResult r = noisy_evaluate(pt.config, *pt.noise);
    row.noise_kind = to_string(pt.noise->kind);
    row.noise_site = pt.noise->site;
    row.p = pt.noise->p;
    if (pt.noise->kind == NoiseKind::ExcitedSuperposition) row.alpha = pt.noise->alpha;
    row.xi = r.xi;
    row.eta = r.eta;
    row.theta = r.theta;
    row.delta_exact = r.delta;
    baseline = r.baseline;
  } else {
    const TeleportResult r = run_exact(pt.config);
    row.xi = r.xi;
    row.eta = r.eta;
    row.theta = r.theta;
    row.delta_exact = r.delta;
    baseline = r.baseline;
  }
  if (pt.shots) {
    ShotResult s = run_shots(pt, baseline);
    row.n_shots = s.stats.n_shots;
    row.mean = s.mean_shift;
    row.sem = s.stats.sem;
    row.seed = pt.seed;
    if (batches) *batches = std::move(s.batches);
  }
  if (pt.verify) verify_row(pt, row);
  return row;
}

// Work pool; results land in input order so output is schedule independent.
template <typename F>
std::vector<ResultRow> parallel_map(std::size_t count, F&& fn) {
  std::vector<ResultRow> rows(count);
  std::vector<std::exception_ptr> errors(count);
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        rows[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

// ---------------------------------------------------------------------------
// Commands

ProtocolConfig base_config(const Options& o) {
  ProtocolConfig c;
  c.spec.kind = parse_model_kind(o.model);
  c.spec.n = o.n;
  c.spec.j = o.j;
  c.spec.h = o.h;
  c.basis = parse_basis(o.basis);
  c.observable = parse_observable(o.observable);
  if (o.theta) c.theta = ThetaPolicy::fixed(*o.theta);
  return c;
}

std::optional<NoiseSpec> make_noise(const Options& o, int n, double p) {
  const auto choice = parse_noise(o.noise, n);
  if (!choice) return std::nullopt;
  NoiseSpec s;
  s.kind = choice->kind;
  s.site = choice->site;
  s.p = p;
  s.alpha = o.alpha;
  return s;
}

double single_p(const Options& o) {
  if (o.p.empty()) {
    if (!o.noise.empty()) throw ValidationError("--noise needs --p");
    return 0.0;
  }
  const auto grid = parse_p(o.p);
  if (grid.size() != 1) throw ValidationError("this command takes a single --p value; use noise or sweep for grids");
  return grid.front();
}

std::uint64_t point_seed(std::uint64_t seed, std::size_t index) {
  return index == 0 ? seed : mix64(seed ^ (0x9e3779b97f4a7c15ULL * index));
}

struct Outcome {
  std::vector<ResultRow> rows;
  std::string summary;
};

std::vector<Point> expand(const Options& o, const std::vector<ProtocolConfig>& configs,
                          const std::vector<std::optional<NoiseSpec>>& noises) {
  std::vector<Point> points;
  const auto as = parse_a(o.a);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    for (int a : as) {
      Point pt;
      pt.config = configs[i];
      pt.config.a = a;
      pt.noise = noises[i];
      pt.shots = o.shots;
      pt.seed = point_seed(o.seed, points.size());
      pt.verify = o.verify;
      validate(pt.config);
      if (pt.noise) validate(*pt.noise, pt.config.spec.n_qubits());
      points.push_back(std::move(pt));
    }
  }
  return points;
}

void check_shots(const Options& o) {
  if (o.shots && (*o.shots < 1 || *o.shots > 1'000'000'000LL))
    throw ValidationError("--shots must be in [1, 1e9]");
}

Outcome cmd_teleport(const Options& o, bool shots_command) {
  Options opt = o;
  if (shots_command && !opt.shots) opt.shots = 10000;
  check_shots(opt);
  const ProtocolConfig c = base_config(opt);
  const auto points = expand(opt, {c}, {make_noise(opt, c.spec.n, single_p(opt))});

  std::vector<std::vector<std::pair<std::string, ShotBatch>>> batches(points.size());
  std::vector<ResultRow> rows = parallel_map(points.size(), [&](std::size_t i) { return evaluate(points[i], &batches[i]); });

  if (!opt.save_counts.empty()) {
    if (!opt.shots) throw ValidationError("--save-counts needs --shots");
    for (std::size_t i = 0; i < points.size(); ++i)
      for (const auto& [label, batch] : batches[i]) {
        const std::string path = opt.save_counts + ".a" + std::to_string(points[i].config.a) + "." + label + ".json";
        std::ofstream f(path);
        if (!f) throw ValidationError("cannot write counts file '" + path + "'");
        f << write_counts(batch);
      }
  }

  std::ostringstream s;
  for (const auto& r : rows) {
    s << " a=" << *r.a << " delta_exact=" << format_number(*r.delta_exact);
    if (r.mean) s << " mean=" << format_number(*r.mean) << " sem=" << format_number(*r.sem);
  }
  return {std::move(rows), s.str()};
}

Outcome cmd_sweep(const Options& o) {
  check_shots(o);
  const ProtocolConfig base = base_config(o);
  const std::string& v = o.variable;
  std::vector<double> grid;
  if (v == "n") {
    const double start = o.start.value_or(1.0);
    const double stop = o.stop.value_or(4.0);
    if (start != std::floor(start) || stop != std::floor(stop) || start < 1 || stop > kMaxSites || !(start < stop))
      throw ValidationError("n sweep needs integer 1 <= start < stop <= " + std::to_string(kMaxSites));
    if (o.steps && *o.steps != static_cast<int>(stop - start) + 1)
      throw ValidationError("n sweep visits every integer; --steps must equal stop - start + 1");
    for (double x = start; x <= stop; x += 1.0) grid.push_back(x);
  } else {
    double start = 0.0, stop = 4.0;
    int steps = 41;
    if (v == "h") {
      start = 0.25;
      stop = 4.0;
      steps = 16;
    } else if (v == "p") {
      start = 0.0;
      stop = 0.5;
      steps = 51;
    } else if (v != "j") {
      throw ValidationError("unknown sweep variable '" + v + "' (expected j|h|p|n)");
    }
    start = o.start.value_or(start);
    stop = o.stop.value_or(stop);
    steps = o.steps.value_or(steps);
    if (steps < 2 || steps > 100000) throw ValidationError("--steps must be in [2, 100000]");
    if (!(start < stop)) throw ValidationError("sweep needs start < stop");
    if (v == "p" && (start < 0.0 || stop > 1.0)) throw ValidationError("p sweep must lie in [0, 1]");
    grid = linspace(start, stop, steps);
  }
  if (v == "p" && o.noise.empty()) throw ValidationError("p sweep needs --noise");
  if (v == "p" && !o.p.empty()) throw ValidationError("p sweep takes its grid from --start/--stop/--steps, not --p");
  const double fixed_p = v == "p" ? 0.0 : single_p(o);

  std::vector<ProtocolConfig> configs;
  std::vector<std::optional<NoiseSpec>> noises;
  for (double x : grid) {
    ProtocolConfig c = base;
    double p = fixed_p;
    if (v == "j") c.spec.j = x;
    if (v == "h") c.spec.h = x;
    if (v == "n") c.spec.n = static_cast<int>(x);
    if (v == "p") p = x;
    configs.push_back(c);
    noises.push_back(make_noise(o, c.spec.n, p));
  }
  const auto points = expand(o, configs, noises);
  auto rows = parallel_map(points.size(), [&](std::size_t i) { return evaluate(points[i]); });
  return {std::move(rows), " variable=" + v + " points=" + std::to_string(grid.size())};
}

Outcome cmd_noise(const Options& o) {
  check_shots(o);
  if (o.noise.empty()) throw ValidationError("noise needs --noise");
  const ProtocolConfig base = base_config(o);
  const std::vector<double> grid = o.p.empty() ? linspace(0.0, 0.5, 51) : parse_p(o.p);
  std::vector<ProtocolConfig> configs(grid.size(), base);
  std::vector<std::optional<NoiseSpec>> noises;
  for (double p : grid) noises.push_back(make_noise(o, base.spec.n, p));
  const auto points = expand(o, configs, noises);
  auto rows = parallel_map(points.size(), [&](std::size_t i) { return evaluate(points[i]); });

  std::ostringstream s;
  if (grid.size() >= 2) {
    for (int a : parse_a(o.a)) {
      ProtocolConfig c = base;
      c.a = a;
      s << " threshold(a=" << a << ")=";
      try {
        const auto t = find_sign_threshold(c, *make_noise(o, base.spec.n, 0.0), grid);
        s << (t ? format_number(*t) : std::string("none"));
      } catch (const ValidationError&) {
        s << "undefined";
      }
    }
  }
  return {std::move(rows), s.str()};
}

Outcome cmd_keyrate(const Options& o) {
  if (o.shots) throw ValidationError("keyrate is exact; --shots is not supported");
  const ProtocolConfig base = base_config(o);
  if (o.observable != "charge") throw ValidationError("keyrate uses the charge observable");
  const std::string noise_name = o.noise.empty() ? "bob-phaseflip" : o.noise;
  const auto choice = parse_noise(noise_name, base.spec.n);
  const std::vector<double> grid = o.p.empty() ? linspace(0.0, 0.1, 21) : parse_p(o.p);
  const TritOptions trit = parse_trit(o);
  NoiseSpec noise;
  noise.kind = choice->kind;
  noise.site = choice->site;
  noise.alpha = o.alpha;

  // One grid point per task; each runs both bases internally.
  std::vector<KeyRatePoint> points(grid.size());
  std::vector<ResultRow> rows = parallel_map(grid.size(), [&](std::size_t i) {
    const KeyRatePoint kp = key_rate_sweep(base.spec, noise, {grid[i]}, trit).front();
    points[i] = kp;
    ProtocolConfig key = base;
    key.basis = Basis::X0;
    key.a = 0;
    NoiseSpec at = noise;
    at.p = grid[i];
    const NoisyResult r = noisy_evaluate(key, at);
    ResultRow row = base_row(key);
    row.noise_kind = to_string(noise.kind);
    row.noise_site = noise.site;
    row.p = grid[i];
    if (noise.kind == NoiseKind::ExcitedSuperposition) row.alpha = noise.alpha;
    row.xi = r.xi;
    row.eta = r.eta;
    row.theta = r.theta;
    row.delta_exact = r.delta;
    row.e_bit = kp.e_bit;
    row.e_ph = kp.e_ph;
    row.k_asym = kp.k_asym;
    return row;
  });
  std::ostringstream s;
  s << " trit=" << o.trit;
  if (trit.model == TritModel::BlockAverage) s << " m=" << trit.block_m;
  s << " K(p0)=" << format_number(points.front().k_asym);
  const auto th = key_rate_threshold(points);
  s << " threshold=" << (th ? format_number(*th) : std::string("none"));
  return {std::move(rows), s.str()};
}

Outcome cmd_ingest(const Options& o) {
  if (o.counts.empty()) throw ValidationError("ingest needs at least one --counts file");
  ProtocolConfig c = base_config(o);
  const auto as = parse_a(o.a);
  if (as.size() != 1) throw ValidationError("ingest evaluates a single branch; pass --a 0 or --a 1");
  c.a = as.front();
  validate(c);

  std::optional<ShotBatch> bz, bx;
  for (const auto& path : o.counts) {
    ShotBatch b = ingest_counts(path);
    if (b.n_sites != c.spec.n_qubits())
      throw ValidationError("counts file '" + path + "' has " + std::to_string(b.n_sites) +
                            " sites, model has " + std::to_string(c.spec.n_qubits()));
    if (b.basis == MeasuredBasis::XX && b.partner != c.spec.partner())
      throw ValidationError("counts file '" + path + "' declares partner " + std::to_string(b.partner) +
                            ", model couples Bob to site " + std::to_string(c.spec.partner()));
    auto& slot = b.basis == MeasuredBasis::Z ? bz : bx;
    if (slot) throw ValidationError("two counts files for basis " + to_string(b.basis));
    slot = std::move(b);
  }

  const TeleportResult exact = run_exact(c);
  ShotStats stats;
  switch (c.observable) {
    case ObservableKind::Charge:
      if (!bz || bx) throw ValidationError("charge needs exactly one Z counts file");
      stats = charge_stats(*bz);
      break;
    case ObservableKind::Energy:
      if (!bz || !bx) throw ValidationError("energy needs one Z and one XX counts file");
      stats = energy_stats(*bz, *bx, c.spec.h, c.spec.j);
      break;
    case ObservableKind::EnergyComponentZ:
    case ObservableKind::EnergyComponentXX: {
      const bool z = c.observable == ObservableKind::EnergyComponentZ;
      const auto& b = z ? bz : bx;
      if (!b || (z ? bx : bz)) throw ValidationError("energy component needs exactly one matching counts file");
      const double coeff = z ? c.spec.h : c.spec.j;
      const double m = b->bob_mean();
      stats.n_shots = b->n_shots;
      stats.mean = coeff * m;
      stats.variance_single = coeff * coeff * std::max(0.0, 1.0 - m * m);
      stats.sem = std::sqrt(stats.variance_single / static_cast<double>(b->n_shots));
      break;
    }
  }
  ResultRow row = base_row(c);
  row.xi = exact.xi;
  row.eta = exact.eta;
  row.theta = exact.theta;
  row.delta_exact = exact.delta;
  row.n_shots = stats.n_shots;
  row.mean = stats.mean - exact.baseline;
  row.sem = stats.sem;
  if (bz && bz->seed)
    row.seed = bz->seed;
  else if (bx && bx->seed)
    row.seed = bx->seed;
  std::ostringstream s;
  s << " mean=" << format_number(*row.mean) << " sem=" << format_number(*row.sem)
    << " delta_exact=" << format_number(exact.delta);
  return {{row}, s.str()};
}

void configure(CLI::App& app, Options& o) {
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_config("--config", "", "Flat key=value file; keys are the long option names", false);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);

  app.add_option("--model", o.model, "star | nn")->capture_default_str();
  app.add_option("--n", o.n, "Bob's site N (N+1 qubits)")->capture_default_str();
  app.add_option("--j", o.j, "Coupling J")->capture_default_str();
  app.add_option("--h", o.h, "Field h")->capture_default_str();
  app.add_option("--basis", o.basis, "Alice's basis: x | y")->capture_default_str();
  app.add_option("--observable", o.observable, "charge | energy | energy-z | energy-xx")->capture_default_str();
  app.add_option("--a", o.a, "Alice's decision bit: 0 | 1 | both")->capture_default_str();
  app.add_option("--theta", o.theta, "Fixed rotation angle (default: optimal for a = 0)");
  app.add_option("--format", o.format, "csv | json")->capture_default_str();
  app.add_option("--out", o.out, "Output file (default stdout)");
  app.add_flag("--verify", o.verify, "Re-run the density-matrix pipeline per row and check the closed form");
  app.add_option("--variable", o.variable, "Sweep variable: j | h | p | n")->capture_default_str();
  app.add_option("--start", o.start, "Sweep start");
  app.add_option("--stop", o.stop, "Sweep stop");
  app.add_option("--steps", o.steps, "Sweep points");
  app.add_option("--noise", o.noise,
                 "classical | mixture | superposition | alice-bitflip | bob-bitflip | alice-phaseflip | bob-phaseflip");
  app.add_option("--p", o.p, "Noise probability, or start:stop:steps");
  app.add_option("--alpha", o.alpha, "Superposition phase (radians)")->capture_default_str();
  app.add_option("--shots", o.shots, "Shots per point (per basis for energy)");
  app.add_option("--seed", o.seed, "Base RNG seed")->capture_default_str();
  app.add_option("--trit", o.trit, "Per-round trit model: reference | block")->capture_default_str();
  app.add_option("--block-m", o.block_m, "Shots per block for the block trit model")->capture_default_str();
  app.add_option("--counts", o.counts, "Counts JSON file (repeatable)");
  app.add_option("--save-counts", o.save_counts, "Write sampled counts to <prefix>.a<a>.<basis>.json");

  const std::vector<std::pair<const char*, const char*>> subs = {
      {"teleport", "Single protocol evaluation"},
      {"sweep", "Sweep j, h, p or n"},
      {"noise", "Noise sweep over p with sign-threshold search"},
      {"keyrate", "Key-rate curve versus noise"},
      {"shots", "Monte Carlo shot experiment"},
      {"ingest", "Statistics from external counts files"}};
  for (const auto& [name, help] : subs) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&o, n = std::string(name)] { o.command = n; });
  }
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Charge-teleportation QKD simulator", "qct"};
  Options o;
  try {
    configure(app, o);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (o.format != "csv" && o.format != "json") throw ValidationError("--format must be csv or json");
    const std::string config = provenance(o).dump();
    Outcome result;
    if (o.command == "teleport")
      result = cmd_teleport(o, false);
    else if (o.command == "shots")
      result = cmd_teleport(o, true);
    else if (o.command == "sweep")
      result = cmd_sweep(o);
    else if (o.command == "noise")
      result = cmd_noise(o);
    else if (o.command == "keyrate")
      result = cmd_keyrate(o);
    else if (o.command == "ingest")
      result = cmd_ingest(o);
    else
      throw ValidationError("unknown command");

    const std::string text = o.format == "csv" ? to_csv(result.rows) : to_json(result.rows, config);
    if (o.out.empty()) {
      out << text;
    } else {
      std::ofstream f(o.out, std::ios::binary);
      if (!f) throw ValidationError("cannot open output file '" + o.out + "'");
      f << text;
      if (!f) throw NumericalError("failed writing output file '" + o.out + "'");
    }
    err << "# config " << config << "\n";
    err << o.command << ": " << result.rows.size() << " row(s) -> " << (o.out.empty() ? "stdout" : o.out)
        << result.summary << "\n";
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << "\n";
    return 1;
  }
}

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_command(args, out, err);
}

}  // namespace qct::cli
