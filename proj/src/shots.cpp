#include "qct/shots.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qct {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double counter_uniform(std::uint64_t seed, std::uint64_t shot, std::uint64_t draw) {
  const std::uint64_t key = mix64(seed) ^ mix64(shot * 4 + draw + 0x632be59bd9b4e019ULL);
  return static_cast<double>(mix64(key) >> 11) * 0x1.0p-53;
}

double ShotBatch::bob_mean() const {
  if (n_shots <= 0) throw ValidationError("empty shot batch");
  const long long plus = counts[0][0] + counts[1][0];
  const long long minus = counts[0][1] + counts[1][1];
  return static_cast<double>(plus - minus) / static_cast<double>(n_shots);
}

std::string to_string(MeasuredBasis basis) { return basis == MeasuredBasis::Z ? "Z" : "XX"; }

namespace {

int bit_of(Eigen::Index index, int site, int n_sites) {
  return static_cast<int>((index >> (n_sites - 1 - site)) & 1);
}

// Hadamard on every site except 0, in place.
void hadamard_bob_side(State& psi, int n_sites) {
  const double s = 1.0 / std::sqrt(2.0);
  for (int site = 1; site < n_sites; ++site) {
    const Eigen::Index stride = Eigen::Index{1} << (n_sites - 1 - site);
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      if (i & stride) continue;
      const auto u = psi(i);
      const auto v = psi(i | stride);
      psi(i) = s * (u + v);
      psi(i | stride) = s * (u - v);
    }
  }
}

struct Branch {
  double weight = 0.0;  // P(component) · P(b | component)
  int b = 0;
  // Over Bob-side readouts (2^N entries), for the communicated bit a and its flip.
  std::array<std::vector<double>, 2> cdf;
};

long long draw_index(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u * cdf.back());
  return std::min<long long>(static_cast<long long>(it - cdf.begin()),
                             static_cast<long long>(cdf.size()) - 1);
}

}  // namespace

ShotBatch sample_protocol(const ProtocolConfig& config, const Resource& resource, long long n_shots,
                          std::uint64_t seed, MeasuredBasis basis, double flip_probability) {
  validate(config);
  if (n_shots < 1) throw ValidationError("n_shots must be >= 1");
  if (!(flip_probability >= 0.0 && flip_probability <= 1.0))
    throw ValidationError("flip probability must be in [0, 1]");
  const ModelSpec& spec = config.spec;
  const int n_sites = spec.n_qubits();

  std::vector<std::pair<double, State>> components;
  bool clamped = false;
  if (const auto* psi = std::get_if<State>(&resource)) {
    if (psi->size() != spec.dim()) throw ValidationError("sample_protocol: resource dimension mismatch");
    check_state_vector(*psi);
    components.emplace_back(1.0, *psi);
  } else {
    const Density& rho = std::get<Density>(resource);
    if (rho.rows() != spec.dim()) throw ValidationError("sample_protocol: resource dimension mismatch");
    check_density_matrix(rho);
    const Spectrum<double> mix = eigendecompose(rho);
    double total = 0.0;
    for (Eigen::Index k = 0; k < mix.size(); ++k) {
      double w = mix.eigenvalues(k);
      if (w < -1e-9) clamped = true;
      if (w <= 0.0) continue;
      total += w;
      components.emplace_back(w, mix.vector(k));
    }
    for (auto& c : components) c.first /= total;
  }

  // θ from the noiseless ground state, as in noisy_evaluate.
  ProtocolConfig calibrated = config;
  calibrated.a = 0;
  const double theta = run_exact(calibrated).theta;
  const ProtocolPair pair = protocol_pair(spec, config.basis);

  std::vector<Branch> branches;
  std::vector<double> branch_cdf;
  const Eigen::Index bob_dim = Eigen::Index{1} << spec.n;
  for (const auto& [w, psi] : components) {
    for (int b = 0; b < 2; ++b) {
      State phi = alice_projector(pair.sigma_a, b) * psi;
      const double pb = phi.squaredNorm();
      if (pb <= 0.0) continue;
      phi /= std::sqrt(pb);
      Branch br;
      br.weight = w * pb;
      br.b = b;
      for (int flip = 0; flip < 2; ++flip) {
        if (flip == 1 && flip_probability == 0.0) break;
        State out = bob_rotation(pair.sigma_b, theta, b ^ config.a ^ flip) * phi;
        if (basis == MeasuredBasis::XX) hadamard_bob_side(out, n_sites);
        auto& cdf = br.cdf[static_cast<std::size_t>(flip)];
        cdf.assign(static_cast<std::size_t>(bob_dim), 0.0);
        for (Eigen::Index i = 0; i < out.size(); ++i)
          cdf[static_cast<std::size_t>(i & (bob_dim - 1))] += std::norm(out(i));
        for (std::size_t i = 1; i < cdf.size(); ++i) cdf[i] += cdf[i - 1];
      }
      branches.push_back(std::move(br));
    }
  }
  if (branches.empty()) throw NumericalError("sample_protocol: no branch has positive probability");
  double acc = 0.0;
  for (const auto& br : branches) branch_cdf.push_back(acc += br.weight);

  std::vector<long long> histogram(static_cast<std::size_t>(Eigen::Index{1} << n_sites), 0);
  for (long long shot = 0; shot < n_shots; ++shot) {
    const auto s = static_cast<std::uint64_t>(shot);
    const Branch& br =
        branches[static_cast<std::size_t>(draw_index(branch_cdf, counter_uniform(seed, s, 0)))];
    const bool flip = flip_probability > 0.0 && counter_uniform(seed, s, 2) < flip_probability;
    const long long readout = draw_index(br.cdf[flip ? 1 : 0], counter_uniform(seed, s, 1));
    const long long index = (static_cast<long long>(br.b) << spec.n) | readout;
    ++histogram[static_cast<std::size_t>(index)];
  }

  ShotBatch out = batch_from_histogram(basis, n_sites, spec.partner(), std::move(histogram), seed);
  out.clamped = clamped;
  return out;
}

ShotBatch sample_protocol(const ProtocolConfig& config, long long n_shots, std::uint64_t seed,
                          MeasuredBasis basis) {
  validate(config);
  return sample_protocol(config, Resource{model_ground_state(config.spec)}, n_shots, seed, basis);
}

ShotBatch batch_from_histogram(MeasuredBasis basis, int n_sites, int partner,
                               std::vector<long long> histogram, std::optional<std::uint64_t> seed) {
  if (n_sites < 2 || n_sites > kMaxQubits)
    throw ValidationError("n_sites must be in [2, " + std::to_string(kMaxQubits) + "]");
  if (partner < 0 || partner >= n_sites - 1)
    throw ValidationError("partner site must be in [0, n_sites - 2]");
  if (histogram.size() != (std::size_t{1} << n_sites))
    throw ValidationError("histogram size does not match n_sites");
  ShotBatch out;
  out.basis = basis;
  out.n_sites = n_sites;
  out.partner = partner;
  out.seed = seed;
  const int bob = n_sites - 1;
  for (std::size_t i = 0; i < histogram.size(); ++i) {
    const long long c = histogram[i];
    if (c < 0) throw ValidationError("negative count");
    if (c == 0) continue;
    const auto index = static_cast<Eigen::Index>(i);
    const int b = bit_of(index, 0, n_sites);
    int o = bit_of(index, bob, n_sites);
    // Partner 0 is Alice: her character is b, and P_A(b) selects σ_A = −(−1)^b.
    if (basis == MeasuredBasis::XX) o ^= partner == 0 ? (b ^ 1) : bit_of(index, partner, n_sites);
    out.counts[static_cast<std::size_t>(b)][static_cast<std::size_t>(o)] += c;
    out.n_shots += c;
  }
  if (out.n_shots == 0) throw ValidationError("counts total zero shots");
  out.histogram = std::move(histogram);
  return out;
}

ShotStats charge_stats(const ShotBatch& batch) {
  if (batch.basis != MeasuredBasis::Z) throw ValidationError("charge_stats needs a Z-basis batch");
  const double z = batch.bob_mean();
  ShotStats s;
  s.n_shots = batch.n_shots;
  s.mean = 0.5 * (1.0 + z);
  s.variance_single = std::max(0.0, 0.25 * (1.0 - z * z));
  s.sem = std::sqrt(s.variance_single / static_cast<double>(s.n_shots));
  return s;
}

ShotStats energy_stats(const ShotBatch& batch_z, const ShotBatch& batch_xx, double h, double j) {
  if (batch_z.basis != MeasuredBasis::Z || batch_xx.basis != MeasuredBasis::XX)
    throw ValidationError("energy_stats needs a Z batch and an XX batch");
  if (batch_z.n_sites != batch_xx.n_sites)
    throw ValidationError("energy_stats: batches come from different models");
  const double z = batch_z.bob_mean();
  const double x = batch_xx.bob_mean();
  const auto nz = static_cast<double>(batch_z.n_shots);
  const auto nx = static_cast<double>(batch_xx.n_shots);
  ShotStats s;
  s.n_shots = batch_z.n_shots + batch_xx.n_shots;
  s.mean = h * z + j * x;
  s.sem = std::sqrt(std::max(0.0, h * h * (1.0 - z * z) / nz + j * j * (1.0 - x * x) / nx));
  s.variance_single = s.sem * s.sem * static_cast<double>(s.n_shots);
  return s;
}

namespace {

MeasuredBasis parse_measured_basis(const std::string& text) {
  if (text == "Z" || text == "Z_N" || text == "z") return MeasuredBasis::Z;
  if (text == "XX" || text == "xx" || text == "X_{N-1}X_N") return MeasuredBasis::XX;
  throw ValidationError("counts: unknown basis '" + text + "' (expected Z or XX)");
}

}  // namespace

ShotBatch parse_counts(const std::string& json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("counts: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("counts: top level must be an object");
  for (const auto& [key, _] : doc.items())
    if (key != "basis" && key != "n_sites" && key != "seed" && key != "partner" && key != "counts" &&
        key != "bit_order")
      throw ValidationError("counts: unknown field '" + key + "'");
  if (!doc.contains("basis") || !doc["basis"].is_string()) throw ValidationError("counts: missing basis");
  if (!doc.contains("n_sites") || !doc["n_sites"].is_number_integer())
    throw ValidationError("counts: missing integer n_sites");
  if (!doc.contains("counts") || !doc["counts"].is_object())
    throw ValidationError("counts: missing counts object");
  if (doc.contains("bit_order") && doc["bit_order"] != "site0_left")
    throw ValidationError("counts: only bit_order \"site0_left\" is supported");

  const MeasuredBasis basis = parse_measured_basis(doc["basis"].get<std::string>());
  const long long n_sites_raw = doc["n_sites"].get<long long>();
  if (n_sites_raw < 2 || n_sites_raw > kMaxQubits)
    throw ValidationError("counts: n_sites must be in [2, " + std::to_string(kMaxQubits) + "]");
  const int n_sites = static_cast<int>(n_sites_raw);
  int partner = n_sites - 2;
  if (doc.contains("partner")) {
    if (!doc["partner"].is_number_integer()) throw ValidationError("counts: partner must be an integer");
    partner = doc["partner"].get<int>();
  }
  std::optional<std::uint64_t> seed;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ValidationError("counts: seed must be a non-negative integer");
    seed = doc["seed"].get<std::uint64_t>();
  }

  std::vector<long long> histogram(std::size_t{1} << n_sites, 0);
  for (const auto& [bits, value] : doc["counts"].items()) {
    if (bits.size() != static_cast<std::size_t>(n_sites))
      throw ValidationError("counts: bitstring '" + bits + "' has width " + std::to_string(bits.size()) +
                            ", expected " + std::to_string(n_sites));
    std::size_t index = 0;
    for (char ch : bits) {
      if (ch != '0' && ch != '1') throw ValidationError("counts: bitstring '" + bits + "' is not binary");
      index = (index << 1) | static_cast<std::size_t>(ch == '1');
    }
    if (!value.is_number_integer()) throw ValidationError("counts: count for '" + bits + "' is not an integer");
    const long long c = value.get<long long>();
    if (c < 0) throw ValidationError("counts: negative count for '" + bits + "'");
    histogram[index] += c;
  }
  return batch_from_histogram(basis, n_sites, partner, std::move(histogram), seed);
}

ShotBatch ingest_counts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("counts: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_counts(buffer.str());
}

std::string write_counts(const ShotBatch& batch) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["basis"] = to_string(batch.basis);
  doc["n_sites"] = batch.n_sites;
  doc["partner"] = batch.partner;
  if (batch.seed) doc["seed"] = *batch.seed;
  ordered_json counts = ordered_json::object();
  for (std::size_t i = 0; i < batch.histogram.size(); ++i) {
    if (batch.histogram[i] == 0) continue;
    std::string bits(static_cast<std::size_t>(batch.n_sites), '0');
    for (int s = 0; s < batch.n_sites; ++s)
      if ((i >> (batch.n_sites - 1 - s)) & 1) bits[static_cast<std::size_t>(s)] = '1';
    counts[bits] = batch.histogram[i];
  }
  doc["counts"] = std::move(counts);
  return doc.dump(2) + "\n";
}

}  // namespace qct
