#include "irgnh/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

namespace irgnh {

namespace pt = boost::property_tree;

std::string_view to_string(Command command) {
  switch (command) {
    case Command::Forward: return "forward";
    case Command::Invert: return "invert";
    case Command::Rates: return "rates";
    case Command::Compare: return "compare";
    case Command::Lemmas: return "lemmas";
  }
  return "unknown";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::Forward, Command::Invert, Command::Rates, Command::Compare, Command::Lemmas})
    if (to_string(c) == name) return c;
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Elliptic: return "elliptic";
    case ProblemKind::Diagonal: return "diagonal";
    case ProblemKind::Scalar: return "scalar";
  }
  return "unknown";
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256_hex: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

namespace {

// Reads one section and remembers which keys were consumed, so leftovers can
// be reported as unknown.
class SectionReader {
 public:
  SectionReader(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  std::optional<std::string> raw(const std::string& key) {
    seen_.insert(key);
    if (!tree_) return std::nullopt;
    auto child = tree_->get_child_optional(pt::ptree::path_type(key, '\0'));
    if (!child) return std::nullopt;
    std::string v = child->data();
    const auto b = v.find_first_not_of(" \t");
    const auto e = v.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : v.substr(b, e - b + 1);
  }

  std::optional<double> number(const std::string& key) {
    auto v = raw(key);
    if (!v) return std::nullopt;
    return to_number(key, *v);
  }

  std::optional<int> integer(const std::string& key) {
    auto v = raw(key);
    if (!v) return std::nullopt;
    std::size_t used = 0;
    long long out = 0;
    try {
      out = std::stoll(*v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v->size()) fail(key, "expected an integer, got '" + *v + "'");
    return static_cast<int>(out);
  }

  std::vector<double> number_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      const auto e = item.find_last_not_of(" \t");
      if (b == std::string::npos) fail(key, "empty list entry");
      out.push_back(to_number(key, item.substr(b, e - b + 1)));
    }
    return out;
  }

  void set(const std::string& key, double& target) {
    if (auto v = number(key)) target = *v;
  }
  void set(const std::string& key, int& target) {
    if (auto v = integer(key)) target = *v;
  }

  void reject_unknown() const {
    if (!tree_) return;
    for (const auto& [key, child] : *tree_) {
      if (!seen_.count(key)) throw ConfigError("unknown key '" + name_ + "." + key + "'");
      if (!child.empty()) throw ConfigError("nested value under '" + name_ + "." + key + "'");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError("invalid value for '" + name_ + "." + key + "': " + what);
  }

 private:
  double to_number(const std::string& key, const std::string& v) const {
    std::size_t used = 0;
    double out = 0.0;
    try {
      out = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size()) fail(key, "expected a number, got '" + v + "'");
    return out;
  }

  const pt::ptree* tree_;
  std::string name_;
  std::set<std::string> seen_;
};

const std::set<std::string> kSections{"problem", "method", "noise", "study", "lemmas", "output"};

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& ex) {
    throw ConfigError(std::string("malformed config: ") + ex.what());
  }
  for (const auto& [name, child] : tree) {
    if (child.empty()) throw ConfigError("key '" + name + "' outside any section");
    if (!kSections.count(name)) throw ConfigError("unknown section [" + name + "]");
  }
  auto section = [&](const std::string& name) {
    auto child = tree.get_child_optional(name);
    return SectionReader(child ? &*child : nullptr, name);
  };

  ExperimentConfig cfg;
  cfg.sha256 = sha256_hex(text);

  {
    auto s = section("problem");
    if (auto kind = s.raw("kind")) {
      if (*kind == "elliptic") cfg.problem.kind = ProblemKind::Elliptic;
      else if (*kind == "diagonal") cfg.problem.kind = ProblemKind::Diagonal;
      else if (*kind == "scalar") cfg.problem.kind = ProblemKind::Scalar;
      else s.fail("kind", "expected elliptic, diagonal or scalar");
    }
    cfg.problem.n = s.integer("n");
    s.set("f_const", cfg.problem.f_const);
    s.set("g_const", cfg.problem.g_const);
    s.set("c_bar", cfg.problem.c_bar);
    s.set("xi", cfg.problem.xi);
    if (auto obs = s.raw("observation")) {
      if (*obs != "full" && *obs != "mask") s.fail("observation", "expected full or mask");
      if (*obs == "mask") {
        auto path = s.raw("observation_mask_path");
        if (!path) throw ConfigError("missing required key 'problem.observation_mask_path' for observation = mask");
        cfg.problem.observation_mask_path = *path;
      }
    }
    (void)s.raw("observation_mask_path");
    s.set("spectrum_decay", cfg.problem.spectrum_decay);
    s.set("v_norm", cfg.problem.v_norm);
    s.set("curvature", cfg.problem.curvature);
    s.set("x_true", cfg.problem.x_true);
    s.set("x_start", cfg.problem.x_start);
    s.reject_unknown();
  }
  {
    auto s = section("method");
    if (auto name = s.raw("name")) {
      if (*name == "halley") cfg.method.method = Method::Halley;
      else if (*name == "irgnm") cfg.method.method = Method::Irgnm;
      else s.fail("name", "expected halley or irgnm");
    }
    cfg.method.p = s.number("p");
    cfg.method.r = s.number("r");
    s.set("alpha0", cfg.method.alpha0);
    s.set("q", cfg.method.q);
    s.set("s", cfg.method.s);
    s.set("tau", cfg.method.tau);
    s.set("alpha_floor", cfg.method.alpha_floor);
    s.set("beta_floor", cfg.method.beta_floor);
    s.set("max_iters", cfg.method.max_iters);
    if (auto ref = s.raw("second_reference")) {
      if (*ref == "x0") cfg.method.second_reference = SecondStageReference::InitialGuess;
      else if (*ref == "xk") cfg.method.second_reference = SecondStageReference::CurrentIterate;
      else s.fail("second_reference", "expected x0 or xk");
    }
    s.set("grad_tol", cfg.method.solver.grad_tol);
    s.set("smoothing_eps", cfg.method.solver.smoothing_eps);
    s.set("continuation_factor", cfg.method.solver.continuation_factor);
    s.set("continuation_steps", cfg.method.solver.continuation_steps);
    s.set("max_inner_iters", cfg.method.solver.max_inner_iters);
    s.reject_unknown();
  }
  {
    auto s = section("noise");
    if (auto kind = s.raw("kind")) {
      try {
        cfg.noise.kind = parse_noise_kind(*kind);
      } catch (const std::invalid_argument&) {
        s.fail("kind", "expected impulsive, gaussian or uniform");
      }
    }
    s.set("fraction", cfg.noise.fraction);
    s.set("amplitude", cfg.noise.relative_amplitude);
    s.set("sigma", cfg.noise.sigma);
    s.set("uniform_amplitude", cfg.noise.amplitude);
    if (auto seed = s.raw("seed")) {
      try {
        std::size_t used = 0;
        cfg.noise.seed = std::stoull(*seed, &used);
        if (used != seed->size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        s.fail("seed", "expected a non-negative integer");
      }
    }
    s.reject_unknown();
  }
  {
    auto s = section("study");
    auto list = s.raw("deltas");
    auto count = s.integer("count");
    auto ratio = s.number("ratio");
    auto start = s.number("delta_max");
    if (list && (count || ratio || start)) throw ConfigError("study: give either 'deltas' or 'count'/'ratio'/'delta_max'");
    if (list) cfg.study.deltas = s.number_list("deltas", *list);
    if (count || ratio || start) {
      if (!count || !ratio || !start) throw ConfigError("study: 'count', 'ratio' and 'delta_max' go together");
      if (*count < 1 || !(*ratio > 0.0 && *ratio < 1.0)) throw ConfigError("study: need count >= 1 and 0 < ratio < 1");
      cfg.study.deltas.clear();
      for (int k = 0; k < *count; ++k) cfg.study.deltas.push_back(*start * std::pow(*ratio, k));
    }
    s.set("workers", cfg.study.workers);
    s.reject_unknown();
  }
  {
    auto s = section("lemmas");
    s.set("samples", cfg.lemmas.samples);
    s.set("k_max", cfg.lemmas.k_max);
    s.reject_unknown();
  }
  {
    auto s = section("output");
    if (auto dir = s.raw("directory")) cfg.output.directory = *dir;
    if (auto formats = s.raw("formats")) {
      cfg.output.formats.clear();
      std::stringstream ss(*formats);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item != "csv" && item != "json" && item != "svg") s.fail("formats", "unknown format '" + item + "'");
        cfg.output.formats.insert(item);
      }
    }
    s.reject_unknown();
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void ExperimentConfig::validate(Command command) const {
  const bool needs_problem = command != Command::Lemmas;
  const bool scalar_rates = command == Command::Rates && problem.kind == ProblemKind::Scalar;
  const bool needs_exponents = command == Command::Invert || (command == Command::Rates && !scalar_rates);

  if (needs_problem && problem.kind != ProblemKind::Scalar)
    require(problem.n.has_value(), "missing required key 'problem.n'");
  if (problem.n) require(*problem.n >= 3, "problem.n must be at least 3");
  require(problem.c_bar > 0.0, "problem.c_bar must be positive");
  require(std::isfinite(problem.f_const) && std::isfinite(problem.g_const), "problem.f_const and g_const must be finite");
  require(std::isfinite(problem.xi), "problem.xi must be finite");
  require(problem.v_norm > 0.0, "problem.v_norm must be positive");
  require(problem.spectrum_decay >= 0.0, "problem.spectrum_decay must be >= 0");

  if (command == Command::Forward || command == Command::Compare)
    require(problem.kind == ProblemKind::Elliptic,
            std::string(to_string(command)) + " requires problem.kind = elliptic");
  if (command == Command::Compare) {
    require(noise.kind == NoiseKind::Impulsive, "compare requires noise.kind = impulsive");
    require(!method.p || *method.p == 2.0, "compare uses p = 2; method.p must be 2 or absent");
    require(!method.r || (*method.r > 1.0 && *method.r < 2.0), "compare needs 1 < method.r < 2 (the robust misfit)");
  }
  if (command == Command::Invert) require(method.method.has_value(), "missing required key 'method.name'");

  auto checked = [](auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ConfigError(std::string("method: ") + ex.what());
    }
  };
  if (needs_exponents) {
    require(method.p.has_value(), "missing required key 'method.p'");
    require(method.r.has_value(), "missing required key 'method.r'");
    checked([&] { (void)exponents(); });
    if (problem.kind == ProblemKind::Diagonal) require(*method.p > 1.0 && *method.r > 1.0, "diagonal benchmark requires p > 1 and r > 1");
    if (command == Command::Rates) require(*method.r > 1.0, "rates sweeps need r > 1");
  }
  if (command == Command::Invert || command == Command::Rates || command == Command::Compare) {
    checked([&] { schedule().validate(); });
    checked([&] { method.solver.validate(); });
    require(method.tau > 1.0, "method.tau must exceed 1");
    require(method.max_iters >= 0, "method.max_iters must be >= 0");
  }
  try {
    noise.validate();
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("noise: ") + ex.what());
  }
  if (command == Command::Rates && problem.kind != ProblemKind::Scalar) {
    require(study.deltas.size() >= 2, "study needs at least two deltas");
    for (std::size_t i = 0; i < study.deltas.size(); ++i) {
      require(study.deltas[i] > 0.0, "study.deltas must be positive");
      if (i > 0) require(study.deltas[i] < study.deltas[i - 1], "study.deltas must be strictly decreasing");
    }
  }
  require(study.workers >= 1, "study.workers must be >= 1");
  require(lemmas.samples >= 1 && lemmas.k_max >= 1, "lemmas.samples and lemmas.k_max must be positive");
  require(!output.formats.empty(), "output.formats must not be empty");
}

ExponentConfig ExperimentConfig::exponents() const {
  if (!method.p || !method.r) throw ConfigError("missing required key 'method.p' or 'method.r'");
  return ExponentConfig::make(*method.p, *method.r);
}

Schedule ExperimentConfig::schedule() const {
  if (method.r && *method.r == 1.0) return Schedule::constant(method.alpha_floor, method.beta_floor);
  return Schedule::geometric(method.alpha0, method.q, method.s);
}

RunConfig ExperimentConfig::run_config(const GridFunction& x0) const {
  RunConfig rc;
  rc.method = method.method.value_or(Method::Halley);
  rc.exponents = exponents();
  rc.schedule = schedule();
  rc.tau = method.tau;
  rc.x0 = x0;
  rc.max_iters = method.max_iters;
  rc.solver = method.solver;
  rc.second_reference = method.second_reference;
  return rc;
}

}  // namespace irgnh
