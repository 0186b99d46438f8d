#include "tierbid/scenario_gen.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

namespace tierbid {

namespace {

constexpr int kSchemaVersion = 1;

int type_of_size(double size_mb) {
  for (int t = 0; t < kNumFileTypes; ++t)
    if (kFileSizesMb[t] == size_mb) return t;
  throw StructuralError("file size does not match a known type");
}

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0xd1b54a32d192ed03ULL * (stream + 1));
  return std::mt19937_64(splitmix64(s));
}

}  // namespace

void GeneratorSpec::validate() const {
  if (num_files < 1) throw StructuralError("num_files must be >= 1");
  if (num_scenarios < 1) throw StructuralError("num_scenarios must be >= 1");
  const double mix = std::accumulate(type_mix.begin(), type_mix.end(), 0.0);
  if (std::abs(mix - 1.0) > 1e-9) throw StructuralError("type_mix must sum to 1");
  for (double m : type_mix)
    if (m < 0.0) throw StructuralError("type_mix proportions must be >= 0");
  if (!(storage_bid_per_mb_lo >= 0.0 && storage_bid_per_mb_hi >= storage_bid_per_mb_lo))
    throw StructuralError("invalid storage bid range");
}

double latency_req_lo_ms(double size_mb) { return 30.0 + size_mb * 1e6 / 5e6; }
double latency_req_hi_ms(double size_mb) { return 30.0 + size_mb * 1e6 / 1e6; }

double access_bid_cents(double size_mb, double arrival_rate, double latency_ms) {
  return 50.0 * size_mb * std::log(arrival_rate + 1.0) / (latency_ms * latency_ms);
}

std::vector<FileSpec> generate_files(const GeneratorSpec& spec) {
  spec.validate();
  auto rng = make_rng(spec.seed, 0);
  std::discrete_distribution<int> type_dist(spec.type_mix.begin(), spec.type_mix.end());
  std::uniform_real_distribution<double> bid_per_mb(spec.storage_bid_per_mb_lo,
                                                    spec.storage_bid_per_mb_hi);
  std::vector<FileSpec> files;
  files.reserve(spec.num_files);
  for (int i = 0; i < spec.num_files; ++i) {
    FileSpec f;
    f.id = i;
    f.size_mb = kFileSizesMb[type_dist(rng)];
    f.storage_bid_cents = f.size_mb * bid_per_mb(rng);
    files.push_back(f);
  }
  return files;
}

std::vector<Scenario> generate_scenarios(const std::vector<FileSpec>& files,
                                         const GeneratorSpec& spec) {
  spec.validate();
  if (files.empty()) throw StructuralError("file list must be non-empty");
  auto rng = make_rng(spec.seed, 1);
  std::vector<Scenario> scenarios(spec.num_scenarios);
  for (int k = 0; k < spec.num_scenarios; ++k) {
    Scenario& sc = scenarios[k];
    sc.index = k;
    // Continuous latency draws make K distinct scenarios almost surely, so
    // the empirical re-draw frequency is 1/K for each.
    sc.probability = 1.0 / spec.num_scenarios;
    sc.access_bid_cents.resize(files.size());
    sc.latency_req_ms.resize(files.size());
    sc.arrival_rate_per_s.resize(files.size());
    for (std::size_t i = 0; i < files.size(); ++i) {
      const int type = type_of_size(files[i].size_mb);
      std::poisson_distribution<int> arrivals(spec.mean_arrivals[type]);
      std::uniform_real_distribution<double> latency(latency_req_lo_ms(files[i].size_mb),
                                                     latency_req_hi_ms(files[i].size_mb));
      const double lambda = static_cast<double>(arrivals(rng));
      const double l = latency(rng);
      sc.arrival_rate_per_s[i] = lambda;
      sc.latency_req_ms[i] = l;
      sc.access_bid_cents[i] = access_bid_cents(files[i].size_mb, lambda, l);
    }
  }
  return scenarios;
}

std::vector<int> realize_slots(const std::vector<Scenario>& scenarios, int num_slots,
                               std::uint64_t seed) {
  if (scenarios.empty()) throw StructuralError("scenario set must be non-empty");
  if (num_slots < 0) throw StructuralError("num_slots must be >= 0");
  double total = 0.0;
  std::vector<double> probs;
  probs.reserve(scenarios.size());
  for (const auto& sc : scenarios) {
    probs.push_back(sc.probability);
    total += sc.probability;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw StructuralError("scenario probabilities must sum to 1");

  auto rng = make_rng(seed, 2);
  std::discrete_distribution<int> dist(probs.begin(), probs.end());
  std::vector<int> slots(num_slots);
  for (int t = 0; t < num_slots; ++t) slots[t] = dist(rng);
  return slots;
}

std::string instance_to_json(const Instance& instance) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["files"] = nlohmann::json::array();
  for (const auto& f : instance.files) {
    j["files"].push_back({{"id", f.id},
                          {"size_mb", f.size_mb},
                          {"storage_bid_cents", f.storage_bid_cents}});
  }
  j["scenarios"] = nlohmann::json::array();
  for (const auto& sc : instance.scenarios) {
    j["scenarios"].push_back({{"index", sc.index},
                              {"probability", sc.probability},
                              {"access_bid_cents", sc.access_bid_cents},
                              {"latency_req_ms", sc.latency_req_ms},
                              {"arrival_rate_per_s", sc.arrival_rate_per_s}});
  }
  return j.dump(2);
}

Instance instance_from_json(const std::string& json_text) {
  const nlohmann::json j = nlohmann::json::parse(json_text);
  if (j.at("schema_version").get<int>() != kSchemaVersion)
    throw StructuralError("unsupported instance schema version");
  Instance instance;
  for (const auto& jf : j.at("files")) {
    FileSpec f;
    f.id = jf.at("id").get<int>();
    f.size_mb = jf.at("size_mb").get<double>();
    f.storage_bid_cents = jf.at("storage_bid_cents").get<double>();
    f.validate();
    instance.files.push_back(f);
  }
  for (const auto& js : j.at("scenarios")) {
    Scenario sc;
    sc.index = js.at("index").get<int>();
    sc.probability = js.at("probability").get<double>();
    sc.access_bid_cents = js.at("access_bid_cents").get<std::vector<double>>();
    sc.latency_req_ms = js.at("latency_req_ms").get<std::vector<double>>();
    sc.arrival_rate_per_s = js.at("arrival_rate_per_s").get<std::vector<double>>();
    instance.scenarios.push_back(sc);
  }
  validate_scenario_set(instance.scenarios, instance.files.size());
  return instance;
}

void save_instance(const Instance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << instance_to_json(instance) << "\n";
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return instance_from_json(buffer.str());
}

}  // namespace tierbid
