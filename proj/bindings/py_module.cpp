#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "sentseq/crf.hpp"
#include "sentseq/modelcheck.hpp"
#include "sentseq/synthetic.hpp"
#include "sentseq/train_loop.hpp"

namespace py = pybind11;
using namespace sentseq;

namespace {

// Checkpoint plus the rebuilt float model, the unit the Python side works with.
struct PyModel {
  Checkpoint ckpt;
  Model model;
  Vocabulary vocab;

  explicit PyModel(Checkpoint c)
      : ckpt(std::move(c)),
        model(model_from_checkpoint(ckpt)),
        vocab(vocab_from_checkpoint(ckpt)) {}

  std::vector<std::vector<std::string>> predict(const Corpus& corpus) const {
    auto encoded = encode_corpus(corpus, vocab);
    auto paths = predict_paths(model, encoded);
    std::vector<std::vector<std::string>> out;
    out.reserve(paths.size());
    for (const auto& path : paths) {
      std::vector<std::string> names;
      names.reserve(path.size());
      for (int y : path) names.push_back(ckpt.labels.name(y));
      out.push_back(std::move(names));
    }
    return out;
  }

  py::dict evaluate(const Corpus& corpus) const {
    auto report = evaluate_model(model, corpus, vocab);
    py::dict out;
    for (const auto& [key, value] : parse_machine_report(machine_report(report)))
      out[py::str(key)] = value;
    return out;
  }
};

RunSettings settings_from_kwargs(const std::string& preset_name, const py::dict& options) {
  RunSettings s = preset_name.empty() ? RunSettings{} : preset(preset_name);
  for (const auto& item : options)
    apply_setting(s, py::cast<std::string>(item.first),
                  py::cast<std::string>(py::str(item.second)));
  return s;
}

}  // namespace

PYBIND11_MODULE(_sentseq, m) {
  m.doc() = "hierarchical sequential sentence classification toolkit";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<Corpus>(m, "Corpus")
      .def_property_readonly("num_abstracts",
                             [](const Corpus& c) { return c.abstracts.size(); })
      .def_property_readonly("num_sentences",
                             [](const Corpus& c) { return c.sentence_count(); })
      .def_property_readonly("labels",
                             [](const Corpus& c) { return c.label_set.names(); })
      .def("gold_paths",
           [](const Corpus& c) {
             std::vector<std::vector<int>> out;
             for (const auto& a : c.abstracts) out.push_back(a.labels);
             return out;
           })
      .def("__repr__", [](const Corpus& c) {
        std::ostringstream out;
        out << "Corpus(" << c.abstracts.size() << " abstracts, " << c.sentence_count()
            << " sentences)";
        return out.str();
      });

  m.def("parse_corpus",
        [](const std::string& path, bool allow_unlabeled) {
          ParseOptions opts;
          opts.allow_unlabeled = allow_unlabeled;
          return parse_rct(path, opts);
        },
        py::arg("path"), py::arg("allow_unlabeled") = false,
        "Parse a corpus file (### id headers, LABEL<TAB>text lines).");

  m.def("save_corpus", &save_corpus, py::arg("corpus"), py::arg("path"));

  m.def("make_synthetic",
        [](int abstracts, std::uint64_t seed, double ambiguity) {
          SyntheticOptions opts;
          opts.num_abstracts = abstracts;
          opts.seed = seed;
          opts.ambiguity = ambiguity;
          return make_synthetic(opts);
        },
        py::arg("abstracts") = 100, py::arg("seed") = 1, py::arg("ambiguity") = 0.0,
        "Generate a grammar-based corpus with the canonical section order.");

  m.def("tokenize",
        [](const std::string& text, bool lowercase, bool digits_to_zero) {
          TokenizeOptions opts;
          opts.lowercase = lowercase;
          opts.digits_to_zero = digits_to_zero;
          return tokenize(text, opts);
        },
        py::arg("text"), py::arg("lowercase") = true, py::arg("digits_to_zero") = false);

  py::class_<PyModel>(m, "Model")
      .def_property_readonly("labels",
                             [](const PyModel& m2) { return m2.ckpt.labels.names(); })
      .def_property_readonly("epoch", [](const PyModel& m2) { return m2.ckpt.epoch; })
      .def_property_readonly("val_weighted_f1",
                             [](const PyModel& m2) { return m2.ckpt.val_weighted_f1; })
      .def("predict", &PyModel::predict, py::arg("corpus"),
           "Label every abstract; returns label-name paths.")
      .def("evaluate", &PyModel::evaluate, py::arg("corpus"),
           "Weighted P/R/F1 metrics as a flat dict.")
      .def("transitions",
           [](const PyModel& m2) {
             if (!m2.ckpt.settings.model.use_crf)
               throw ConfigError("model was trained without the label-sequence layer");
             const int l = m2.ckpt.labels.size();
             const auto& t = m2.model.transitions().value();
             std::vector<std::vector<float>> out(static_cast<std::size_t>(l));
             for (int i = 0; i < l; ++i)
               out[static_cast<std::size_t>(i)] =
                   std::vector<float>(t.begin() + static_cast<std::size_t>(i) * l,
                                      t.begin() + static_cast<std::size_t>(i + 1) * l);
             return out;
           },
           "Learned transition matrix, rows = previous label.")
      .def("save",
           [](const PyModel& m2, const std::string& path) { save_checkpoint(m2.ckpt, path); },
           py::arg("path"));

  m.def("load_model",
        [](const std::string& path) { return PyModel(load_checkpoint(path)); },
        py::arg("path"));

  m.def("train",
        [](const Corpus& train_corpus, const Corpus& val_corpus,
           const std::string& preset_name, py::dict options) {
          RunSettings s = settings_from_kwargs(preset_name, options);
          Corpus val = val_corpus;
          val.split = Split::Validation;
          py::gil_scoped_release release;
          auto outcome = train_model(s, train_corpus, val, nullptr, nullptr);
          py::gil_scoped_acquire acquire;
          return PyModel(outcome.best);
        },
        py::arg("train_corpus"), py::arg("val_corpus"), py::arg("preset") = "tiny-rnn",
        py::arg("options") = py::dict(),
        "Train and return the best-validation-epoch model. options maps config "
        "keys (e.g. 'train.epochs') to values.");

  m.def("viterbi",
        [](const std::vector<std::vector<double>>& emissions,
           const std::vector<std::vector<double>>& transitions) {
          const int l = static_cast<int>(transitions.size());
          std::vector<double> flat;
          for (const auto& row : transitions) {
            if (static_cast<int>(row.size()) != l)
              throw ContractError("transition matrix must be square");
            flat.insert(flat.end(), row.begin(), row.end());
          }
          return viterbi_decode(emissions, flat, l);
        },
        py::arg("emissions"), py::arg("transitions"),
        "Max-score label path; ties break toward the lowest index.");

  m.def("log_partition",
        [](const std::vector<std::vector<double>>& emissions,
           const std::vector<std::vector<double>>& transitions) {
          const int l = static_cast<int>(transitions.size());
          GraphT<double> g;
          std::vector<TensorT<double>> emis;
          for (const auto& row : emissions) {
            if (static_cast<int>(row.size()) != l)
              throw ContractError("emission rows must have one score per label");
            emis.push_back(TensorT<double>::of({l}, row));
          }
          std::vector<double> flat;
          for (const auto& row : transitions) flat.insert(flat.end(), row.begin(), row.end());
          return crf_log_partition(g, emis, TensorT<double>::of({l, l}, flat)).item();
        },
        py::arg("emissions"), py::arg("transitions"),
        "log sum over all label paths of exp(path score).");

  m.def("grad_check",
        [](std::uint64_t seed) {
          double worst = 0;
          for (const auto& outcome : run_model_grad_checks(seed))
            worst = std::max(worst, outcome.result.max_rel_err);
          return worst;
        },
        py::arg("seed") = 7,
        "Max relative error of autodiff vs central differences over the tiny "
        "model zoo.");

  m.def("preset_names", &preset_names);
}
