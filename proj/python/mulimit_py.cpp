#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mulimit/ca_engine.hpp"
#include "mulimit/construction.hpp"
#include "mulimit/errors.hpp"
#include "mulimit/experiment.hpp"

namespace py = pybind11;
using namespace mulimit;

namespace {

py::dict measure_dict(const MeasureEstimate& m) {
    py::dict d;
    d["count"] = m.count;
    d["total"] = m.total;
    d["num"] = m.value.num();
    d["den"] = m.value.den();
    d["value"] = m.value.to_double();
    return d;
}

py::dict series_dict(const std::map<std::uint64_t, double>& m) {
    py::dict d;
    for (auto [t, v] : m) {
        d[py::int_(t)] = v;
    }
    return d;
}

py::dict result_dict(const ExperimentResult& r) {
    py::dict out;
    out["transient"] = r.transient;
    py::list verdicts;
    for (const auto& v : r.verdicts) {
        py::dict d;
        d["word"] = r.alphabet.render(v.word);
        d["class"] = verdict_name(v.cls);
        d["final_mean"] = v.final_mean;
        d["first_mean"] = v.first_mean;
        d["peak"] = v.peak;
        d["note"] = v.note;
        verdicts.append(d);
    }
    out["verdicts"] = verdicts;
    py::dict densities;
    for (const auto& s : r.densities) {
        densities[py::str(r.alphabet.render(s.word))] = series_dict(s.samples);
    }
    out["densities"] = densities;
    py::dict segments;
    for (const auto& s : r.segment_series) {
        segments[py::str(s.name)] = series_dict(s.mean);
    }
    out["segments"] = segments;
    return out;
}

SubshiftSpec named_subshift(const std::string& name) {
    if (name == "fibonacci") {
        return fibonacci_substitution();
    }
    if (name == "thue-morse") {
        return thue_morse_substitution();
    }
    if (name == "even") {
        return even_shift();
    }
    throw ValidationError("name", "unknown subshift '" + name + "'");
}

class PyConstruction {
  public:
    PyConstruction(const std::string& config_text, std::size_t trial)
        : config_(parse_config(config_text)),
          c_(Construction::sampled(config_.construction_params(), config_.N, config_.seed,
                                   config_.star_density, trial)) {}

    void run(std::uint64_t steps) { c_.run(steps); }
    std::uint64_t time() const { return c_.time(); }
    std::string main_layer() const { return c_.alphabet().render(Word(c_.project().cells())); }
    std::vector<int> palette_row() const {
        std::vector<int> out;
        for (const auto& cell : c_.cells()) {
            out.push_back(palette_level(cell));
        }
        return out;
    }
    std::optional<std::uint64_t> quiescence_time() const { return c_.quiescence_time(); }
    std::size_t merges() const { return c_.merge_events().size(); }
    std::uint64_t counter_time_constant() const { return c_.counter_time_constant(); }

  private:
    ExperimentConfig config_;
    Construction c_;
};

} // namespace

PYBIND11_MODULE(_mulimit, m) {
    m.doc() = "mulimit core bindings";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);
    py::register_exception<EnumerationTooLarge>(m, "EnumerationTooLarge", PyExc_RuntimeError);

    m.def(
        "exact_measure",
        [](const std::string& rule, const std::string& word, std::size_t n) {
            const LocalRule r = rule_fixture(rule);
            return measure_dict(exact_measure(r, r.alphabet.parse(word), n));
        },
        py::arg("rule"), py::arg("word"), py::arg("n"),
        "Exact measure of [word] after n steps from the uniform Bernoulli measure.");

    m.def(
        "fragment_layout",
        [](std::size_t n, const std::vector<std::string>& words,
           const std::string& glyphs) -> std::optional<std::string> {
            const Alphabet a(".#$&*" + glyphs);
            std::vector<Word> ws;
            for (const auto& w : words) {
                ws.push_back(a.parse(w));
            }
            const auto out = fragment_layout(n, ws);
            if (!out) {
                return std::nullopt;
            }
            return a.render(*out);
        },
        py::arg("n"), py::arg("words"), py::arg("glyphs") = "ab",
        "Interior of an n-cell segment after writing the given fragments.");

    m.def(
        "generator_prefix",
        [](const std::string& name, std::size_t length) {
            const auto g = make_generator(named_subshift(name));
            while (g->emitted().size() < length) {
                g->emit_next(UINT64_MAX);
            }
            return g->output_alphabet().render(g->emitted());
        },
        py::arg("name"), py::arg("length"),
        "First symbols emitted by a named generator: fibonacci, thue-morse or even.");

    m.def(
        "parse_config",
        [](const std::string& text) { return render_config(parse_config(text)); },
        py::arg("text"), "Validate a config and return its canonical text.");

    m.def(
        "oracle",
        [](const std::string& text) { return run_oracle(parse_config(text)).line; },
        py::arg("text"));

    m.def(
        "run_experiment",
        [](const std::string& text, unsigned workers) {
            const ExperimentConfig c = parse_config(text);
            ExperimentResult r;
            {
                py::gil_scoped_release release;
                r = run_experiment(c, workers);
            }
            return result_dict(r);
        },
        py::arg("text"), py::arg("workers") = 1);

    m.def(
        "diagram",
        [](const std::string& text, std::size_t trial) {
            std::ostringstream out;
            write_diagram(parse_config(text), trial, out);
            return out.str();
        },
        py::arg("text"), py::arg("trial") = 0, "P2 graymap of one trial.");

    py::class_<PyConstruction>(m, "Construction")
        .def(py::init<const std::string&, std::size_t>(), py::arg("config"), py::arg("trial") = 0)
        .def("run", &PyConstruction::run, py::arg("steps"))
        .def_property_readonly("time", &PyConstruction::time)
        .def_property_readonly("main_layer", &PyConstruction::main_layer)
        .def_property_readonly("quiescence_time", &PyConstruction::quiescence_time)
        .def_property_readonly("merges", &PyConstruction::merges)
        .def_property_readonly("counter_time_constant", &PyConstruction::counter_time_constant)
        .def("palette_row", &PyConstruction::palette_row);
}
