#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "homnet/audit.hpp"
#include "homnet/cli.hpp"

namespace py = pybind11;
using namespace homnet;

namespace {

Path to_path(const std::string& word) { return parse_path(word); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Saddle-focus homoclinic network laboratory: local/return maps, "
              "switching-path realization, and attraction audits.";

    py::register_exception<ModelError>(m, "ModelError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<HypothesisViolationError>(m, "HypothesisViolation", PyExc_ValueError);

    py::enum_<Side>(m, "Side")
        .value("plus", Side::Plus)
        .value("minus", Side::Minus)
        .value("stable", Side::Stable);
    py::enum_<Cap>(m, "Cap").value("top", Cap::Top).value("bottom", Cap::Bottom);
    py::enum_<Symbol>(m, "Symbol").value("gamma1", Symbol::Gamma1).value("gamma2", Symbol::Gamma2);
    py::enum_<BoundaryTag>(m, "BoundaryTag")
        .value("sigma_in_plus", BoundaryTag::SigmaInPlus)
        .value("sigma_in_minus", BoundaryTag::SigmaInMinus)
        .value("sigma_out_top", BoundaryTag::SigmaOutTop)
        .value("sigma_out_bottom", BoundaryTag::SigmaOutBottom)
        .value("omega", BoundaryTag::Omega)
        .value("interior", BoundaryTag::Interior);
    py::enum_<Termination>(m, "Termination")
        .value("max_steps", Termination::MaxSteps)
        .value("hit_stable_manifold", Termination::HitStableManifold)
        .value("left_neighbourhood", Termination::LeftNeighbourhood)
        .value("underflow", Termination::Underflow);
    py::enum_<RealizeMode>(m, "RealizeMode")
        .value("nested", RealizeMode::Nested)
        .value("reseeded", RealizeMode::Reseeded);

    py::class_<SaddleSpectrum>(m, "SaddleSpectrum")
        .def(py::init([](double C, double E, double alpha, bool contrast_ok) {
                 SaddleSpectrum s{C, E, alpha, contrast_ok};
                 s.validate();
                 return s;
             }),
             py::arg("C") = 2.0, py::arg("E") = 1.0, py::arg("alpha") = 1.0,
             py::arg("contrast_ok") = false)
        .def_readonly("C", &SaddleSpectrum::C)
        .def_readonly("E", &SaddleSpectrum::E)
        .def_readonly("alpha", &SaddleSpectrum::alpha)
        .def("delta", &SaddleSpectrum::delta)
        .def("__repr__", [](const SaddleSpectrum& s) {
            std::ostringstream os;
            os << "SaddleSpectrum(C=" << s.C << ", E=" << s.E << ", alpha=" << s.alpha << ")";
            return os.str();
        });

    py::class_<Mat2>(m, "Mat2")
        .def(py::init([](double a11, double a12, double a21, double a22) {
                 return Mat2{a11, a12, a21, a22};
             }),
             py::arg("a11") = 1.0, py::arg("a12") = 0.0, py::arg("a21") = 0.0,
             py::arg("a22") = 1.0)
        .def_readonly("a11", &Mat2::a11)
        .def_readonly("a12", &Mat2::a12)
        .def_readonly("a21", &Mat2::a21)
        .def_readonly("a22", &Mat2::a22)
        .def("det", &Mat2::det)
        .def("norm", &Mat2::norm);

    py::class_<TransitionSpec>(m, "TransitionSpec")
        .def(py::init([](Mat2 A, double mu, double tau, double r_max) {
                 TransitionSpec t{A, mu, tau, r_max};
                 t.validate();
                 return t;
             }),
             py::arg("A") = Mat2{}, py::arg("mu") = 0.0, py::arg("tau") = 1.0,
             py::arg("r_max") = 1.0)
        .def_readonly("A", &TransitionSpec::A)
        .def_readonly("mu", &TransitionSpec::mu)
        .def_readonly("tau", &TransitionSpec::tau)
        .def_readonly("r_max", &TransitionSpec::r_max);

    py::class_<CylinderPoint>(m, "CylinderPoint")
        .def(py::init([](double rho, double theta, double z) {
                 return CylinderPoint{rho, theta, z};
             }),
             py::arg("rho"), py::arg("theta"), py::arg("z"))
        .def_readonly("rho", &CylinderPoint::rho)
        .def_readonly("theta", &CylinderPoint::theta)
        .def_readonly("z", &CylinderPoint::z);

    py::class_<WallPoint>(m, "WallPoint")
        .def(py::init([](double x, double y) { return WallPoint{x, y}; }), py::arg("x"),
             py::arg("y"))
        .def_readonly("x", &WallPoint::x)
        .def_readonly("y", &WallPoint::y)
        .def("side", &WallPoint::side)
        .def("__repr__", [](const WallPoint& w) {
            std::ostringstream os;
            os << "WallPoint(x=" << w.x << ", y=" << w.y << ")";
            return os.str();
        });

    py::class_<CapPoint>(m, "CapPoint")
        .def(py::init([](double r, double phi, Cap cap) { return CapPoint{r, phi, cap}; }),
             py::arg("r"), py::arg("phi"), py::arg("cap"))
        .def_readonly("r", &CapPoint::r)
        .def_readonly("phi", &CapPoint::phi)
        .def_readonly("cap", &CapPoint::cap)
        .def("u", &CapPoint::u)
        .def("v", &CapPoint::v);

    m.def("local_flow", &local_flow, py::arg("p"), py::arg("t"), py::arg("spec"));
    m.def("time_of_flight", &time_of_flight, py::arg("w"), py::arg("spec"));
    m.def("local_map", &local_map, py::arg("w"), py::arg("spec"));
    m.def("apply_symmetry", py::overload_cast<const CylinderPoint&>(&apply_symmetry));
    m.def("apply_symmetry", py::overload_cast<const WallPoint&>(&apply_symmetry));
    m.def("apply_symmetry", py::overload_cast<const CapPoint&>(&apply_symmetry));
    m.def("classify_boundary", &classify_boundary, py::arg("p"), py::arg("tol") = 1e-12);
    m.def("transition", &transition, py::arg("cap"), py::arg("tspec"));

    py::class_<ReturnResult>(m, "ReturnResult")
        .def_readonly("point", &ReturnResult::point)
        .def_readonly("symbol", &ReturnResult::symbol)
        .def_readonly("exit_phi", &ReturnResult::exit_phi)
        .def_readonly("flight_time", &ReturnResult::flight_time);
    m.def("return_map", &return_map, py::arg("w"), py::arg("spec"), py::arg("tspec"));
    m.def(
        "return_jacobian",
        [](const WallPoint& w, const SaddleSpectrum& s, const TransitionSpec& t) {
            const Mat2 j = return_jacobian(w, s, t);
            return py::make_tuple(j.a11, j.a12, j.a21, j.a22);
        },
        py::arg("w"), py::arg("spec"), py::arg("tspec"));

    py::class_<OrbitStep>(m, "OrbitStep")
        .def_readonly("at", &OrbitStep::at)
        .def_readonly("symbol", &OrbitStep::symbol)
        .def_readonly("flight_time", &OrbitStep::flight_time)
        .def_readonly("revolutions", &OrbitStep::revolutions);
    py::class_<OrbitRecord>(m, "OrbitRecord")
        .def_readonly("initial", &OrbitRecord::initial)
        .def_readonly("steps", &OrbitRecord::steps)
        .def_readonly("termination", &OrbitRecord::termination)
        .def_readonly("final", &OrbitRecord::final)
        .def("word", &OrbitRecord::word);
    m.def(
        "iterate",
        [](const WallPoint& w, int n_max, double stable_tol, const SaddleSpectrum& s,
           const TransitionSpec& t) {
            return iterate(w, IterateOptions{n_max, stable_tol}, s, t);
        },
        py::arg("w"), py::arg("n_max"), py::arg("stable_tol"), py::arg("spec"),
        py::arg("tspec"));

    py::class_<Segment>(m, "Segment")
        .def_static("vertical", &Segment::vertical, py::arg("x0"), py::arg("y0"))
        .def_static("default_seed", &Segment::default_seed)
        .def("at", &Segment::at, py::arg("s"))
        .def("endpoint", &Segment::endpoint)
        .def("side", &Segment::side)
        .def("mirrored", &Segment::mirrored);

    py::class_<Crossing>(m, "Crossing")
        .def_readonly("s", &Crossing::s)
        .def_readonly("residual", &Crossing::residual)
        .def_readonly("side_outward", &Crossing::side_outward);
    m.def(
        "find_crossings",
        [](const Segment& beta, int k_max, const SaddleSpectrum& s, const TransitionSpec& t) {
            return find_crossings(beta, k_max, s, t);
        },
        py::arg("segment"), py::arg("k_max"), py::arg("spec"), py::arg("tspec"));

    py::class_<BracketRecord>(m, "BracketRecord")
        .def_readonly("depth", &BracketRecord::depth)
        .def_readonly("symbol", &BracketRecord::symbol)
        .def_readonly("ring_index", &BracketRecord::ring_index)
        .def_readonly("seed_lo", &BracketRecord::seed_lo)
        .def_readonly("seed_hi", &BracketRecord::seed_hi)
        .def_readonly("width", &BracketRecord::width);
    py::class_<AdmissibleInterval>(m, "AdmissibleInterval")
        .def_readonly("s_lo", &AdmissibleInterval::s_lo)
        .def_readonly("s_hi", &AdmissibleInterval::s_hi)
        .def_readonly("depth", &AdmissibleInterval::depth)
        .def_readonly("log", &AdmissibleInterval::log)
        .def_property_readonly("prefix",
                               [](const AdmissibleInterval& a) { return format_path(a.prefix); })
        .def("closed_subset", &AdmissibleInterval::closed_subset, py::arg("fraction") = 0.8);
    py::class_<Realization>(m, "Realization")
        .def_readonly("interval", &Realization::interval)
        .def_readonly("seed_param", &Realization::seed_param)
        .def_readonly("seed_point", &Realization::seed_point)
        .def_readonly("witness", &Realization::witness)
        .def_readonly("check", &Realization::check)
        .def_readonly("widths", &Realization::widths);
    m.def(
        "realize_path",
        [](const std::string& word, const Segment& seed, RealizeMode mode, int ring_skip,
           const SaddleSpectrum& s, const TransitionSpec& t) {
            RealizeOptions opt;
            opt.mode = mode;
            opt.ring_skip = ring_skip;
            return realize_path(to_path(word), seed, opt, s, t);
        },
        py::arg("path"), py::arg("seed"), py::arg("mode"), py::arg("ring_skip"),
        py::arg("spec"), py::arg("tspec"));
    m.def(
        "realize_infinite_prefix",
        [](const std::function<int(int)>& stream, int depth, const Segment& seed,
           const SaddleSpectrum& s, const TransitionSpec& t) {
            RealizeOptions opt;
            opt.mode = RealizeMode::Reseeded;
            const auto pre = realize_infinite_prefix(
                [&](int i) {
                    return stream(i) == 2 ? Symbol::Gamma2 : Symbol::Gamma1;
                },
                depth, seed, opt, s, t);
            return py::make_tuple(pre.realization, format_path(pre.consumed),
                                  pre.midpoint_param);
        },
        py::arg("stream"), py::arg("depth"), py::arg("seed"), py::arg("spec"),
        py::arg("tspec"));

    py::class_<SectionEvent>(m, "SectionEvent")
        .def_readonly("t", &SectionEvent::t)
        .def_readonly("section", &SectionEvent::section)
        .def_readonly("a", &SectionEvent::a)
        .def_readonly("b", &SectionEvent::b);
    py::class_<SuspendedTrajectory>(m, "SuspendedTrajectory")
        .def_readonly("initial", &SuspendedTrajectory::initial)
        .def_readonly("events", &SuspendedTrajectory::events)
        .def_property_readonly("sample_count", [](const SuspendedTrajectory& t) {
            return t.samples.size();
        });
    m.def("suspend_orbit", &suspend_orbit, py::arg("w"), py::arg("horizon"),
          py::arg("sample_dt"), py::arg("spec"), py::arg("tspec"));

    py::class_<FollowsReport>(m, "FollowsReport")
        .def_readonly("follows", &FollowsReport::follows)
        .def_readonly("entry_times", &FollowsReport::entry_times)
        .def_readonly("visit_times", &FollowsReport::visit_times)
        .def_readonly("violation", &FollowsReport::violation)
        .def_readonly("violation_index", &FollowsReport::violation_index);
    m.def(
        "verify_follows",
        [](const SuspendedTrajectory& traj, const std::string& word, double tube_window,
           const TransitionSpec& t) {
            return verify_follows(traj, to_path(word), NeighbourhoodSpec{tube_window}, t);
        },
        py::arg("trajectory"), py::arg("path"), py::arg("tube_window"), py::arg("tspec"));

    py::class_<StabilityReport>(m, "StabilityReport")
        .def_readonly("samples", &StabilityReport::samples)
        .def_readonly("attracted", &StabilityReport::attracted)
        .def_readonly("escaped", &StabilityReport::escaped)
        .def_readonly("undecided", &StabilityReport::undecided)
        .def_readonly("max_excursion", &StabilityReport::max_excursion)
        .def_readonly("max_steps", &StabilityReport::max_steps)
        .def_readonly("mean_steps", &StabilityReport::mean_steps);
    m.def(
        "stability_sample",
        [](int samples, double y_lo, double y_hi, std::uint64_t seed, const SaddleSpectrum& s,
           const TransitionSpec& t) {
            StabilityOptions opt;
            opt.samples = samples;
            opt.y_lo = y_lo;
            opt.y_hi = y_hi;
            opt.seed = seed;
            return stability_sample(opt, s, t);
        },
        py::arg("samples"), py::arg("y_lo"), py::arg("y_hi"), py::arg("seed"), py::arg("spec"),
        py::arg("tspec"));

    py::class_<ContractionProfile>(m, "ContractionProfile")
        .def_readonly("y", &ContractionProfile::y)
        .def_readonly("norm", &ContractionProfile::norm)
        .def_readonly("slope", &ContractionProfile::slope);
    m.def(
        "contraction_profile",
        [](int grid, double y_lo, double y_hi, const SaddleSpectrum& s,
           const TransitionSpec& t) {
            ContractionOptions opt;
            opt.grid = grid;
            opt.y_lo = y_lo;
            opt.y_hi = y_hi;
            return contraction_profile(opt, s, t);
        },
        py::arg("grid"), py::arg("y_lo"), py::arg("y_hi"), py::arg("spec"), py::arg("tspec"));

    py::class_<PeriodicOrbit>(m, "PeriodicOrbit")
        .def_readonly("period", &PeriodicOrbit::period)
        .def_readonly("point", &PeriodicOrbit::point)
        .def_readonly("word", &PeriodicOrbit::word)
        .def_readonly("mult_abs_max", &PeriodicOrbit::mult_abs_max)
        .def_readonly("attracting", &PeriodicOrbit::attracting)
        .def_readonly("symmetric_self", &PeriodicOrbit::symmetric_self);
    py::class_<AttractorReport>(m, "AttractorReport")
        .def_readonly("mu", &AttractorReport::mu)
        .def_readonly("orbits", &AttractorReport::orbits)
        .def_readonly("transient_word", &AttractorReport::transient_word)
        .def_readonly("transient_switches", &AttractorReport::transient_switches);
    m.def(
        "periodic_orbit_search",
        [](int max_period, double y_floor, int grid, const SaddleSpectrum& s,
           const TransitionSpec& t) {
            PeriodicSearchOptions opt;
            opt.max_period = max_period;
            opt.y_floor = y_floor;
            opt.grid_x = grid;
            opt.grid_y = grid;
            return periodic_orbit_search(opt, s, t);
        },
        py::arg("max_period"), py::arg("y_floor"), py::arg("grid"), py::arg("spec"),
        py::arg("tspec"));
    m.def(
        "attractor_scan",
        [](const std::vector<double>& mu_values, const SaddleSpectrum& s,
           const TransitionSpec& t) {
            AttractorScanOptions opt;
            opt.mu_values = mu_values;
            return attractor_scan(opt, s, t);
        },
        py::arg("mu_values"), py::arg("spec"), py::arg("tspec"));

    py::class_<WallRect>(m, "WallRect")
        .def(py::init([](double xc, double hw, double y_lo, double y_hi) {
                 return WallRect{xc, hw, y_lo, y_hi};
             }),
             py::arg("x_center"), py::arg("x_halfwidth"), py::arg("y_lo"), py::arg("y_hi"))
        .def_readonly("x_center", &WallRect::x_center)
        .def_readonly("x_halfwidth", &WallRect::x_halfwidth)
        .def_readonly("y_lo", &WallRect::y_lo)
        .def_readonly("y_hi", &WallRect::y_hi);
    py::class_<CrossingEvidence>(m, "CrossingEvidence")
        .def_readonly("rect", &CrossingEvidence::rect)
        .def_readonly("transits_lo", &CrossingEvidence::transits_lo)
        .def_readonly("transits_hi", &CrossingEvidence::transits_hi)
        .def_readonly("double_crossing", &CrossingEvidence::double_crossing);
    m.def("horseshoe_check", &horseshoe_check, py::arg("rect"), py::arg("spec"),
          py::arg("tspec"), py::arg("fiber_samples") = 4096);

    m.attr("__version__") = "0.1.0";
}
