// Python bindings: terms and constellations as parsed values, plus the
// engine and the encodings behind text-level entry points.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "stellar/constellation.hpp"
#include "stellar/encodings.hpp"
#include "stellar/engine.hpp"
#include "stellar/mll.hpp"
#include "stellar/syntax.hpp"
#include "stellar/unify.hpp"

namespace py = pybind11;
using namespace stellar;

namespace {

EngineOptions engine_options(const std::optional<std::vector<std::string>>& colours, std::size_t max_vertices,
                             std::size_t budget, unsigned jobs) {
  EngineOptions options;
  if (colours) options.colours = ColourSet::of(*colours);
  options.max_vertices = max_vertices;
  options.max_expansions = budget;
  options.jobs = jobs;
  return options;
}

py::dict result_dict(const ExecutionResult& r) {
  py::dict d;
  d["stars"] = r.stars;
  d["complete"] = r.complete;
  d["incomplete_reason"] = r.incomplete_reason;
  d["diagrams_explored"] = r.diagrams_explored;
  return d;
}

}  // namespace

PYBIND11_MODULE(_stellar, m) {
  m.doc() = "Stellar resolution engine";

  static py::exception<ParseError> parse_error(m, "ParseError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      parse_error(e.what());
    }
  });

  py::class_<Term>(m, "Term")
      .def(py::init([](const std::string& text) { return parse_term(text); }), py::arg("text"))
      .def_property_readonly("is_ground", &Term::is_ground)
      .def_property_readonly("is_coloured", &Term::is_coloured)
      .def_property_readonly("depth", &Term::depth)
      .def("underlying", [](const Term& t) { return underlying(t); })
      .def("opposite", [](const Term& t) { return opposite(t); })
      .def("__eq__", [](const Term& a, const Term& b) { return a == b; })
      .def("__hash__", &Term::hash)
      .def("__str__", &Term::to_string)
      .def("__repr__", [](const Term& t) { return "Term('" + t.to_string() + "')"; });

  py::class_<Star>(m, "Star")
      .def(py::init([](const std::string& text) { return parse_star(text); }), py::arg("text"))
      .def_readonly("rays", &Star::rays)
      .def("__len__", &Star::size)
      .def("alpha_equivalent", [](const Star& a, const Star& b) { return alpha_equivalent(a, b); })
      .def("__str__", &Star::to_string)
      .def("__repr__", [](const Star& s) { return "Star('" + s.to_string() + "')"; });

  py::class_<Constellation>(m, "Constellation")
      .def(py::init([](const std::string& text) { return parse_constellation(text); }), py::arg("text"))
      .def_readonly("stars", &Constellation::stars)
      .def("__len__", &Constellation::size)
      .def("__getitem__", [](const Constellation& c, std::size_t i) {
        if (i >= c.size()) throw py::index_error();
        return c[i];
      })
      .def("__add__", [](const Constellation& a, const Constellation& b) { return disjoint_union(a, b); })
      .def("equivalent", [](const Constellation& a, const Constellation& b) { return equivalent_multisets(a, b); })
      .def("print", [](const Constellation& c) { return print_constellation(c); })
      .def("__str__", &Constellation::to_string)
      .def("__repr__", [](const Constellation& c) { return "Constellation('" + c.to_string() + "')"; });

  m.def(
      "unify",
      [](const Term& a, const Term& b) -> std::optional<std::map<std::string, std::string>> {
        const SolveResult r = unify(a, b);
        if (!r.ok()) return std::nullopt;
        std::map<std::string, std::string> out;
        for (const auto& [v, t] : r.unifier().bindings()) out[var_to_string(v)] = t.to_string();
        return out;
      },
      py::arg("a"), py::arg("b"), "Most general unifier as {variable: term}, or None.");

  m.def(
      "matchable",
      [](const Term& a, const Term& b, const std::optional<std::vector<std::string>>& colours) {
        return matchable(a, b, colours ? ColourSet::of(*colours) : ColourSet::all());
      },
      py::arg("a"), py::arg("b"), py::arg("colours") = py::none());

  m.def(
      "analyze",
      [](const Constellation& phi, const std::optional<std::vector<std::string>>& colours) {
        const PropertyReport r = analyze(phi, colours ? ColourSet::of(*colours) : ColourSet::all());
        py::dict d;
        d["exact"] = r.exact;
        d["acyclic"] = r.acyclic;
        d["connected"] = r.connected;
        d["monovalent"] = r.monovalent;
        return d;
      },
      py::arg("constellation"), py::arg("colours") = py::none());

  m.def(
      "execute",
      [](const Constellation& phi, const std::optional<std::vector<std::string>>& colours, std::size_t max_vertices,
         std::size_t budget, unsigned jobs) {
        ExecutionResult r;
        {
          py::gil_scoped_release release;
          r = execute(phi, engine_options(colours, max_vertices, budget, jobs));
        }
        return result_dict(r);
      },
      py::arg("constellation"), py::arg("colours") = py::none(), py::arg("max_vertices") = 64,
      py::arg("budget") = 250'000, py::arg("jobs") = 1,
      "Ex_A(Φ): {'stars', 'complete', 'incomplete_reason', 'diagrams_explored'}.");

  m.def(
      "run_logic_program",
      [](const std::string& text, const std::optional<std::string>& query) {
        const LogicProgramSource src = parse_logic_program(text);
        const Term q = query ? parse_term(*query) : src.query.value_or(Term{});
        if (!q.valid()) throw py::value_error("no query given");
        return result_dict(run_logic_program(src.program, q));
      },
      py::arg("program"), py::arg("query") = py::none());

  m.def(
      "run_turing_machine",
      [](const std::string& machine, const std::string& word) {
        return to_string(run_ntm(parse_turing_machine(machine), word).verdict);
      },
      py::arg("machine"), py::arg("word"), "ACCEPT, REJECT or UNKNOWN.");

  m.def(
      "mll_check",
      [](const std::string& json) { return mll::to_string(mll::check(mll::parse_proof_structure(json)).status); },
      py::arg("structure"), "Verdict of the stellar correctness criterion.");

  m.def(
      "mll_normalise",
      [](const std::string& json, std::size_t max_vertices) {
        EngineOptions options;
        options.max_vertices = max_vertices;
        return result_dict(mll::normalise_via_execution(mll::parse_proof_structure(json), options));
      },
      py::arg("structure"), py::arg("max_vertices") = 64, "Ex(comp(S)).");
}
