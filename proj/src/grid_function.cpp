#include "irgnh/grid_function.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace irgnh {

Space Space::unit_square(int n) {
  if (n < 1) throw std::invalid_argument("unit_square: n must be positive");
  const double h = 1.0 / (n + 1);
  return Space{static_cast<Index>(n) * n, n, h * h};
}

Space Space::flat(Index size, double weight) {
  if (size < 0) throw std::invalid_argument("flat space: negative size");
  return Space{size, 0, weight};
}

namespace {

void validate_space(const Space& space) {
  if (!(space.weight > 0.0) || !std::isfinite(space.weight))
    throw std::invalid_argument("GridFunction: weight must be positive and finite");
  if (space.nodes_per_axis > 0 &&
      space.size != static_cast<Index>(space.nodes_per_axis) * space.nodes_per_axis)
    throw std::invalid_argument("GridFunction: size does not match nodes per axis");
}

}  // namespace

GridFunction::GridFunction(const Space& space, double fill)
    : space_(space), values_(Eigen::VectorXd::Constant(space.size, fill)) {
  validate_space(space_);
}

GridFunction::GridFunction(const Space& space, Eigen::VectorXd values)
    : space_(space), values_(std::move(values)) {
  validate_space(space_);
  if (values_.size() != space_.size)
    throw std::invalid_argument("GridFunction: value count does not match space");
  if (!values_.allFinite())
    throw std::invalid_argument("GridFunction: values must be finite");
}

void require_same_space(const Space& a, const Space& b, const char* what) {
  if (!(a == b)) {
    std::ostringstream msg;
    msg << what << ": space mismatch (" << a.size << " nodes, weight " << a.weight
        << " vs " << b.size << " nodes, weight " << b.weight << ")";
    throw SpaceMismatch(msg.str());
  }
}

GridFunction& GridFunction::operator+=(const GridFunction& rhs) {
  require_same_space(space_, rhs.space_, "GridFunction +=");
  values_ += rhs.values_;
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& rhs) {
  require_same_space(space_, rhs.space_, "GridFunction -=");
  values_ -= rhs.values_;
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  values_ *= s;
  return *this;
}

GridFunction GridFunction::cwise_product(const GridFunction& rhs) const {
  require_same_space(space_, rhs.space_, "GridFunction cwise_product");
  GridFunction out(space_);
  out.values_ = values_.cwiseProduct(rhs.values_);
  return out;
}

double inner(const GridFunction& a, const GridFunction& b) {
  require_same_space(a.space(), b.space(), "inner");
  return a.weight() * a.values().dot(b.values());
}

std::pair<double, double> node_coordinates(const Space& space, Index index) {
  const int n = space.nodes_per_axis;
  if (n <= 0) throw std::invalid_argument("node_coordinates: space has no grid geometry");
  const double h = 1.0 / (n + 1);
  const Index col = index % n;
  const Index row = index / n;
  return {(col + 1) * h, (row + 1) * h};
}

void write_csv(const GridFunction& v, std::ostream& out) {
  out << "index,value\n" << std::setprecision(17);
  for (Index i = 0; i < v.size(); ++i) out << i << ',' << v[i] << '\n';
}

void write_csv(const GridFunction& v, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(v, out);
}

GridFunction read_csv(std::istream& in, const Space& space) {
  GridFunction v(space);
  std::string line;
  std::vector<bool> seen(static_cast<std::size_t>(space.size), false);
  Index count = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line.rfind("index", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("read_csv: malformed line: " + line);
    const Index i = std::stoll(line.substr(0, comma));
    const double value = std::stod(line.substr(comma + 1));
    if (i < 0 || i >= space.size) throw std::runtime_error("read_csv: index out of range");
    if (!std::isfinite(value)) throw std::runtime_error("read_csv: non-finite value");
    v[i] = value;
    if (!seen[static_cast<std::size_t>(i)]) ++count;
    seen[static_cast<std::size_t>(i)] = true;
  }
  if (count != space.size) throw std::runtime_error("read_csv: missing entries");
  return v;
}

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
bool get_le(std::istream& in, T& value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) return false;
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  value = std::bit_cast<T>(bytes);
  return true;
}

}  // namespace

void write_binary(const GridFunction& v, std::ostream& out) {
  put_le<std::int64_t>(out, v.nodes_per_axis());
  put_le<double>(out, v.weight());
  for (Index i = 0; i < v.size(); ++i) put_le<double>(out, v[i]);
}

GridFunction read_binary(std::istream& in) {
  std::int64_t n = 0;
  double weight = 0.0;
  if (!get_le(in, n) || !get_le(in, weight)) throw std::runtime_error("read_binary: truncated header");
  std::vector<double> values;
  double x = 0.0;
  while (get_le(in, x)) values.push_back(x);
  Space space = n > 0 ? Space{static_cast<Index>(n) * n, static_cast<int>(n), weight}
                      : Space::flat(static_cast<Index>(values.size()), weight);
  if (static_cast<Index>(values.size()) != space.size)
    throw std::runtime_error("read_binary: value count does not match header");
  return GridFunction(space, Eigen::Map<Eigen::VectorXd>(values.data(), space.size));
}

}  // namespace irgnh
