#include "falsify/signal.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace falsify {

namespace {

// Snaps x / step onto an integer when it is within the relative grid tolerance.
std::optional<std::size_t> snap(double x, double step) {
  const double q = x / step;
  const double r = std::round(q);
  if (r < 0.0 || std::abs(q - r) > kGridTolerance * std::max(1.0, std::abs(q))) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(r);
}

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace

Signal::Signal(std::vector<std::string> var_names, double step, std::vector<double> values)
    : names_(std::move(var_names)), step_(step), values_(std::move(values)) {
  require(!names_.empty(), "signal needs at least one variable");
  require(std::isfinite(step_) && step_ > 0.0, "signal step must be positive and finite");
  require(!values_.empty(), "signal needs at least one sample");
  require(values_.size() % names_.size() == 0, "sample count does not match dimension");
  for (double v : values_) require(std::isfinite(v), "signal samples must be finite");
}

Signal Signal::from_rows(std::vector<std::string> var_names, double step,
                         const std::vector<std::vector<double>>& rows) {
  std::vector<double> flat;
  flat.reserve(rows.size() * var_names.size());
  for (const auto& r : rows) {
    require(r.size() == var_names.size(), "row width does not match dimension");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Signal(std::move(var_names), step, std::move(flat));
}

std::optional<std::size_t> Signal::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::vector<double> Signal::column(std::size_t var) const {
  std::vector<double> out(size());
  for (std::size_t j = 0; j < size(); ++j) out[j] = at(j, var);
  return out;
}

std::size_t Signal::grid_index(double t) const {
  auto idx = snap(t, step_);
  if (!idx || *idx >= size()) {
    std::ostringstream os;
    os << "time " << t << " is not a grid point of [0, " << horizon() << "] with step " << step_;
    throw std::invalid_argument(os.str());
  }
  return *idx;
}

Signal concat(const Signal& w, const Signal& w2) {
  require(w.dim() == w2.dim(), "concat: dimension mismatch");
  require(std::abs(w.step() - w2.step()) <= kGridTolerance * w.step(), "concat: step mismatch");
  std::vector<double> values(w.values().begin(), w.values().end());
  auto tail = w2.values().subspan(w2.dim());
  values.insert(values.end(), tail.begin(), tail.end());
  return Signal(w.var_names(), w.step(), std::move(values));
}

Signal restrict(const Signal& w, double t1, double t2) {
  const std::size_t i1 = w.grid_index(t1);
  const std::size_t i2 = w.grid_index(t2);
  require(i1 < i2, "restrict: need t1 < t2");
  auto v = w.values();
  return Signal(w.var_names(), w.step(),
                std::vector<double>(v.begin() + i1 * w.dim(), v.begin() + (i2 + 1) * w.dim()));
}

Signal shift(const Signal& w, double t) {
  const std::size_t i = w.grid_index(t);
  auto v = w.values();
  return Signal(w.var_names(), w.step(), std::vector<double>(v.begin() + i * w.dim(), v.end()));
}

PiecewiseConstantInput::PiecewiseConstantInput(std::size_t k, std::size_t m, double t,
                                               std::vector<double> lv)
    : control_points(k), dims(m), horizon(t), levels(std::move(lv)) {
  require(k > 0 && m > 0, "piecewise-constant input needs K >= 1 and M >= 1");
  require(std::isfinite(t) && t > 0.0, "piecewise-constant input needs a positive horizon");
  require(levels.size() == k * m, "levels must be a K x M matrix");
}

Signal realize(const PiecewiseConstantInput& u, double step, std::vector<std::string> var_names) {
  require(step > 0.0, "realize: step must be positive");
  const auto per_segment = snap(u.horizon / static_cast<double>(u.control_points), step);
  require(per_segment && *per_segment > 0, "realize: T/K must be a multiple of step");
  if (var_names.empty()) {
    for (std::size_t j = 0; j < u.dims; ++j) var_names.push_back("u" + std::to_string(j + 1));
  }
  require(var_names.size() == u.dims, "realize: variable names do not match dimension");
  const std::size_t r = *per_segment;
  const std::size_t n = r * u.control_points;
  std::vector<double> values;
  values.reserve((n + 1) * u.dims);
  for (std::size_t j = 0; j <= n; ++j) {
    const auto row = u.row(std::min(j / r, u.control_points - 1));
    values.insert(values.end(), row.begin(), row.end());
  }
  return Signal(std::move(var_names), step, std::move(values));
}

void write_csv(std::ostream& out, const Signal& w) {
  out << 't';
  for (const auto& n : w.var_names()) out << ',' << n;
  out << '\n';
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t j = 0; j < w.size(); ++j) {
    out << static_cast<double>(j) * w.step();
    for (double v : w.sample(j)) out << ',' << v;
    out << '\n';
  }
  out.precision(old);
}

Signal read_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "csv: missing header");
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      header.push_back(cell);
    }
  }
  require(header.size() >= 2 && header.front() == "t", "csv: header must be t,<vars...>");
  std::vector<std::string> names(header.begin() + 1, header.end());

  std::vector<double> times;
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ls, cell, ',')) {
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("csv: bad number '" + cell + "' on line " +
                                    std::to_string(lineno));
      }
      if (col == 0) times.push_back(v); else values.push_back(v);
      ++col;
    }
    require(col == header.size(), "csv: wrong column count on line " + std::to_string(lineno));
  }
  require(!times.empty(), "csv: no samples");
  require(std::abs(times.front()) <= kGridTolerance, "csv: first sample must be at t = 0");
  double step = 1.0;
  if (times.size() > 1) {
    step = times.back() / static_cast<double>(times.size() - 1);
    for (std::size_t j = 0; j < times.size(); ++j) {
      const double expected = static_cast<double>(j) * step;
      require(std::abs(times[j] - expected) <= 1e-6 * std::max(1.0, std::abs(expected)),
              "csv: samples are not uniformly spaced");
    }
  }
  return Signal(std::move(names), step, std::move(values));
}

}  // namespace falsify
