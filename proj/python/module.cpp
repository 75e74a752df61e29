#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "alignmark/bounds.hpp"
#include "alignmark/correlation.hpp"
#include "alignmark/io.hpp"
#include "alignmark/matrix.hpp"
#include "alignmark/search.hpp"
#include "alignmark/simulate.hpp"
#include "alignmark/spectrum.hpp"

namespace py = pybind11;
using namespace alignmark;

namespace {

using Grid = std::vector<std::vector<int>>;

Grid to_grid(const BinaryMatrix& m) {
  Grid g(m.rows(), std::vector<int>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) g[i][j] = m.at(i, j);
  return g;
}

BinaryMatrix from_grid(const Grid& g) { return BinaryMatrix::from_rows(g); }

py::dict spectrum_dict(const DistanceSpectrum& s) {
  py::dict d;
  d["p"] = s.p;
  d["s"] = s.s;
  d["d1"] = s.d1;
  d["counts"] = s.counts;
  d["histogram"] = to_string(s);
  return d;
}

Grid autocorrelation(const Grid& g) {
  const AutocorrelationMap a = autocorrelate(from_grid(g));
  Grid out(a.grid_rows(), std::vector<int>(a.grid_cols()));
  for (int i = 0; i < a.grid_rows(); ++i)
    for (int j = 0; j < a.grid_cols(); ++j) out[i][j] = a(i - a.source_rows() + 1, j - a.source_cols() + 1);
  return out;
}

py::list bounds(int rows, int cols) {
  py::list out;
  for (const BoundRow& r : bound_table(rows, cols).entries) {
    py::dict d;
    d["p"] = r.p;
    d["s_lower_I"] = r.s_lower_I;
    d["s_lower_II"] = r.s_lower_II;
    d["d1_upper_I"] = r.d1_upper_I;
    d["d1_upper_II"] = r.d1_upper_II;
    out.append(d);
  }
  return out;
}

py::dict run_search(int rows, int cols, bool diagonal, int top_k, bool per_p, int threads, bool force) {
  SearchConfig c;
  c.rows = rows;
  c.cols = cols;
  c.restriction = diagonal ? SymmetryRestriction::kDiagonal : SymmetryRestriction::kNone;
  c.top_k = top_k;
  c.per_p = per_p;
  c.threads = threads;
  c.partition_depth = std::min(2, rows - 1);
  c.force = force;
  SearchReport r;
  {
    py::gil_scoped_release release;
    r = search(c);
  }
  py::dict d;
  d["rows"] = r.rows;
  d["cols"] = r.cols;
  d["diagonal"] = diagonal;
  d["best_d1"] = r.best_d1;
  d["optimal_classes"] = r.optimal_classes;
  d["unique_optimum"] = r.unique_optimum;
  py::list optima;
  for (const RankedMatrix& m : r.optima) {
    py::dict o = spectrum_dict(m.spectrum);
    o["matrix"] = to_grid(m.matrix);
    o["orbit_size"] = m.orbit_size;
    optima.append(o);
  }
  d["optima"] = optima;
  py::list curve;
  for (const CurvePoint& p : r.curve) {
    py::dict e;
    e["p"] = p.p;
    e["s_min"] = p.s_min ? py::object(py::int_(*p.s_min)) : py::object(py::none());
    e["count"] = p.classes;
    e["count_raw"] = p.raw;
    curve.append(e);
  }
  d["curve"] = curve;
  d["leaves"] = r.stats.leaves;
  d["seconds"] = r.stats.seconds;
  return d;
}

py::list simulate(const Grid& mark, const std::vector<double>& snr_db, int expansion, int background, int trials,
                  std::uint64_t seed, int threads) {
  TrialConfig c;
  c.mark = from_grid(mark);
  c.expansion_k = expansion;
  c.background_factor = background;
  c.snr_db = snr_db;
  c.trials = trials;
  c.seed = seed;
  c.threads = threads;
  std::vector<SweepPoint> points;
  {
    py::gil_scoped_release release;
    points = run_sweep(c);
  }
  py::list out;
  for (const SweepPoint& p : points) {
    py::dict d;
    d["snr_db"] = p.snr_db;
    d["sigma"] = p.sigma;
    d["trials"] = p.trials;
    d["rms_dx"] = p.rms_dx;
    d["rms_dy"] = p.rms_dy;
    d["rms_dx_stderr"] = p.rms_dx_stderr;
    d["rms_dy_stderr"] = p.rms_dy_stderr;
    d["mean_abs_dx"] = p.mean_abs_dx;
    d["mean_abs_dy"] = p.mean_abs_dy;
    d["misalign_rate"] = p.misalign_rate;
    d["misalign_stderr"] = p.misalign_stderr;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);

  m.def("parse_matrix", [](const std::string& text) { return to_grid(parse_matrix(text)); }, py::arg("text"));
  m.def("format_matrix", [](const Grid& g) { return format_matrix(from_grid(g)); }, py::arg("matrix"));
  m.def("autocorrelation", &autocorrelation, py::arg("matrix"));
  m.def("spectrum", [](const Grid& g) { return spectrum_dict(spectrum_of(from_grid(g))); }, py::arg("matrix"));
  m.def("ranks_above",
        [](const Grid& a, const Grid& b) { return ranks_above(spectrum_of(from_grid(a)), spectrum_of(from_grid(b))); },
        py::arg("a"), py::arg("b"));
  m.def("sharpness",
        [](const Grid& g) {
          const Rational r = sharpness(from_grid(g));
          return py::make_tuple(r.num, r.den);
        },
        py::arg("matrix"));
  m.def("canonical_form", [](const Grid& g) { return to_grid(canonical_form(from_grid(g))); }, py::arg("matrix"));
  m.def("expand", [](const Grid& g, int k) { return to_grid(expand(from_grid(g), k)); }, py::arg("matrix"),
        py::arg("k"));
  m.def("cross_mark", [](int n) { return to_grid(cross_mark(n)); }, py::arg("n"));
  m.def("bounds", &bounds, py::arg("rows"), py::arg("cols"));
  m.def("search", &run_search, py::arg("rows"), py::arg("cols"), py::arg("diagonal") = false,
        py::arg("top_k") = 3, py::arg("per_p") = false, py::arg("threads") = 1, py::arg("force") = false);
  m.def("simulate", &simulate, py::arg("mark"), py::arg("snr_db"), py::arg("expansion") = 1,
        py::arg("background") = 5, py::arg("trials") = 10000, py::arg("seed") = 0, py::arg("threads") = 1);
  m.attr("__version__") = ALIGNMARK_VERSION;
}
