#include "kms_cayley/cone_fan.hpp"
#include "kms_cayley/error.hpp"
#include "kms_cayley/group.hpp"
#include "kms_cayley/kms.hpp"
#include "kms_cayley/n_infinity.hpp"
#include "kms_cayley/numerics.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>

namespace py = pybind11;
using namespace kms;

namespace {

using SpecPtr = std::shared_ptr<const GroupSpec>;

// Python-facing handle: the spec plus its partition data.
struct Group {
  SpecPtr spec;
  PartitionData data;

  explicit Group(GroupSpec s) : spec(std::make_shared<const GroupSpec>(std::move(s))), data(*spec) {}
};

SolverConfig config() { return SolverConfig::from_env(); }

Word word(const Group& g, const std::string& text) { return g.spec->parse_word(text); }

py::dict limit_dict(const Group& g, const LimitPoint& lp) {
  py::dict d;
  d["p"] = lp.p;
  py::list support;
  for (std::size_t s = 0; s < lp.p.size(); ++s)
    if (lp.support[s]) support.append(g.spec->symbol(s));
  d["support"] = support;
  return d;
}

py::dict cone_dict(const Group& g, const Cone& c) {
  py::dict d;
  py::list members;
  for (auto s : c.members) members.append(g.spec->symbol(s));
  d["members"] = members;
  d["dim"] = c.dim;
  d["rays"] = c.rays;
  if (c.dim > 0) d["center"] = c.center;
  return d;
}

// Mirrors the CLI: explicit atom, else the critical state, else the Q(β) point in direction v.
KmsState make_state(const Group& g, std::optional<double> beta, std::optional<Vec> u_vec,
                    std::optional<double> dihedral_t, std::optional<Vec> v) {
  const SolverConfig cfg = config();
  const double beta0 = critical_beta(g.data, cfg);
  const double b = beta ? *beta : beta0;
  if (dihedral_t) return KmsState(b, {{1.0, DihedralAtom{*dihedral_t}}});
  if (u_vec) return KmsState(b, {{1.0, QBetaPoint{*u_vec, b}}});
  if (b < beta0 - cfg.eps_geom) throw DomainError("no abelian KMS states below the critical beta");
  if (g.spec->rank() == 0) {
    if (b > beta0 + cfg.eps_geom) throw DomainError("rank 0 admits abelian KMS states only at the critical beta");
    return KmsState(beta0, {{1.0, QBetaPoint{Vec(0), beta0}}});
  }
  const Vec u0 = u_of_beta(g.data, b, cfg);
  if (v) {
    const Vec dir = v->normalized();
    return KmsState(b, {{1.0, QBetaPoint{u0 + radial_root(g.data, b, u0, dir, cfg) * dir, b}}});
  }
  if (b > beta0 + cfg.eps_geom) throw InputError("a direction v is needed above the critical beta");
  return KmsState(beta0, {{1.0, QBetaPoint{u0, beta0}}});
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "KMS states on Cayley graphs of finitely generated groups";

  auto base = py::register_exception<Error>(m, "KmsError");
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<UnsupportedError>(m, "UnsupportedError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

  py::class_<Group, std::shared_ptr<Group>>(m, "Group")
      .def(py::init([](const std::string& name_or_path) { return std::make_shared<Group>(load_group(name_or_path)); }),
           py::arg("name_or_path"))
      .def_static("from_json", [](const std::string& text) { return std::make_shared<Group>(group_from_json(text)); })
      .def_property_readonly("name", [](const Group& g) { return g.spec->name(); })
      .def_property_readonly("rank", [](const Group& g) { return g.spec->rank(); })
      .def_property_readonly("generators", [](const Group& g) { return g.spec->generators(); })
      .def_property_readonly("potentials", [](const Group& g) { return g.spec->potentials(); })
      .def_property_readonly("cvecs", [](const Group& g) { return g.spec->cvecs(); })
      .def("validate",
           [](const Group& g) {
             const auto report = validate_spec(*g.spec, config().eps_geom);
             py::dict d;
             d["valid"] = report.ok();
             d["violations"] = report.violations;
             return d;
           })
      .def("same_endpoint", [](const Group& g, const std::string& t, const std::string& u) {
        return g.spec->same_endpoint(word(g, t), word(g, u));
      })
      .def("__repr__", [](const Group& g) { return "<Group " + g.spec->name() + ">"; });

  m.def("builtin_groups", &builtin_group_names);

  m.def("critical_beta", [](const Group& g) { return critical_beta(g.data, config()); }, py::arg("group"));
  m.def("beta_of_u", [](const Group& g, const Vec& u) { return beta_of_u(g.data, u, config()); }, py::arg("group"),
        py::arg("u"));
  m.def("u_of_beta", [](const Group& g, double beta) { return u_of_beta(g.data, beta, config()); }, py::arg("group"),
        py::arg("beta"));
  m.def("radial_root", [](const Group& g, double beta, const Vec& v) { return radial_root(g.data, beta, v, config()); },
        py::arg("group"), py::arg("beta"), py::arg("v"));
  m.def("sphere_grid", &sphere_grid, py::arg("n"), py::arg("K"));

  m.def(
      "sample_q_beta",
      [](const Group& g, double beta, std::size_t K) {
        const auto s = sample_q_beta(*g.spec, beta, K, config());
        py::dict d;
        d["case"] = s.kind == QBetaCase::Empty ? "empty" : s.kind == QBetaCase::Critical ? "critical" : "sphere";
        d["beta0"] = s.beta0;
        py::list points;
        for (const auto& p : s.points) points.append(p.u);
        d["points"] = points;
        return d;
      },
      py::arg("group"), py::arg("beta"), py::arg("K") = 64);

  m.def(
      "kms_eval",
      [](const Group& g, const std::string& t, const std::string& u, std::optional<double> beta,
         std::optional<Vec> u_vec, std::optional<double> dihedral_t, std::optional<Vec> v) {
        return state_eval(g.spec, make_state(g, beta, u_vec, dihedral_t, v), word(g, t), word(g, u));
      },
      py::arg("group"), py::arg("t"), py::arg("u"), py::arg("beta") = py::none(), py::arg("u_vec") = py::none(),
      py::arg("dihedral_t") = py::none(), py::arg("v") = py::none());

  m.def(
      "kms_check",
      [](const Group& g, std::optional<double> beta, std::optional<Vec> u_vec, std::optional<double> dihedral_t,
         std::optional<Vec> v, int max_length) {
        const auto state = make_state(g, beta, u_vec, dihedral_t, v);
        return kms_condition_check(atom_vector(g.spec, state.beta(), state.mixture().front()), max_length);
      },
      py::arg("group"), py::arg("beta") = py::none(), py::arg("u_vec") = py::none(),
      py::arg("dihedral_t") = py::none(), py::arg("v") = py::none(), py::arg("L") = 4);

  m.def(
      "harmonic_residual",
      [](const Group& g, std::optional<double> beta, std::optional<Vec> u_vec, std::optional<double> dihedral_t,
         std::optional<Vec> v, int radius) {
        const auto state = make_state(g, beta, u_vec, dihedral_t, v);
        return harmonic_residual(atom_vector(g.spec, state.beta(), state.mixture().front()), radius);
      },
      py::arg("group"), py::arg("beta") = py::none(), py::arg("u_vec") = py::none(),
      py::arg("dihedral_t") = py::none(), py::arg("v") = py::none(), py::arg("radius") = 6);

  m.def(
      "fan",
      [](const Group& g) {
        const Fan f = build_fan(*g.spec, config());
        py::list cones;
        for (const auto& c : f.cones()) cones.append(cone_dict(g, c));
        return cones;
      },
      py::arg("group"));

  py::class_<HMap>(m, "HMap")
      .def(py::init([](const Group& g) { return HMap(*g.spec, config()); }), py::arg("group"))
      .def("__call__", [](const HMap& h, const Vec& v) { return h.eval(v).p; }, py::arg("v"));

  m.def(
      "ninf",
      [](const Group& g, const Vec& v) { return limit_dict(g, HMap(*g.spec, config()).eval(v)); }, py::arg("group"),
      py::arg("v"));
  m.def(
      "ray_limit", [](const Group& g, const Vec& v) { return ray_limit(g.data, v, {}, config()).p; }, py::arg("group"),
      py::arg("v"));
  m.def(
      "associated_limit",
      [](const Group& g, const Vec& v) { return associated_limit(build_fan(*g.spec, config()), g.data, v, {}, config()).p; },
      py::arg("group"), py::arg("v"));
}
