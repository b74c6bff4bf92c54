// Copyright 2026 The recurlab Authors.

// Licensed under the Apache License, Version 2.0 (the License);
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

// http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an AS IS BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "recurlab/serialize.hpp"

#include <fstream>
#include <sstream>

namespace recurlab {

namespace {

Json entries_to_json(const Eigen::MatrixXcd &m) {
    Json entries = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            entries.push_back({m(i, j).real(), m(i, j).imag()});
        }
    }
    return entries;
}

Eigen::MatrixXcd entries_from_json(const Json &entries, Eigen::Index rows,
                                   Eigen::Index cols) {
    if (static_cast<Eigen::Index>(entries.size()) != rows * cols) {
        throw IoError("matrix json: entry count does not match shape");
    }
    Eigen::MatrixXcd m(rows, cols);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j, ++k) {
            const auto &e = entries[static_cast<size_t>(k)];
            if (!e.is_array() || e.size() != 2) {
                throw IoError("matrix json: entries must be [re, im] pairs");
            }
            m(i, j) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

} // namespace

Json to_json(const ComplexMatrix &m) {
    return Json{{"rows", m.rows()},
                {"cols", m.cols()},
                {"entries", entries_to_json(m.mat())}};
}

Json to_json(const UnitaryMatrix &u) {
    return Json{{"dim", u.dim()}, {"entries", entries_to_json(u.mat())}};
}

ComplexMatrix complex_matrix_from_json(const Json &j) {
    if (j.contains("dim")) {
        const auto d = j.at("dim").get<Eigen::Index>();
        return ComplexMatrix(entries_from_json(j.at("entries"), d, d));
    }
    return ComplexMatrix(entries_from_json(j.at("entries"),
                                           j.at("rows").get<Eigen::Index>(),
                                           j.at("cols").get<Eigen::Index>()));
}

UnitaryMatrix unitary_from_json(const Json &j) {
    const auto d = j.at("dim").get<Eigen::Index>();
    return UnitaryMatrix(entries_from_json(j.at("entries"), d, d));
}

Json to_json(const QubitState &state) {
    Json amps = Json::array();
    for (Eigen::Index i = 0; i < state.dim(); ++i) {
        amps.push_back(
            {state.amplitudes()[i].real(), state.amplitudes()[i].imag()});
    }
    return Json{{"qubits", state.num_qubits()}, {"amplitudes", amps}};
}

QubitState state_from_json(const Json &j) {
    const int n = j.at("qubits").get<int>();
    const auto &amps = j.at("amplitudes");
    Eigen::VectorXcd v(static_cast<Eigen::Index>(amps.size()));
    for (size_t i = 0; i < amps.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] =
            Complex(amps[i][0].get<double>(), amps[i][1].get<double>());
    }
    if (v.size() != (Eigen::Index{1} << n)) {
        throw IoError("state json: amplitude count does not match qubits");
    }
    return QubitState(std::move(v));
}

Json to_json(const CircuitSpec &circuit) {
    Json gates = Json::array();
    for (const GateOp &g : circuit.gates) {
        gates.push_back(Json{{"matrix", to_json(g.matrix)},
                             {"targets", g.targets},
                             {"controls", g.controls}});
    }
    return Json{{"layout",
                 {{"number_qubits", circuit.layout.number_qubits},
                  {"state_qubits", circuit.layout.state_qubits}}},
                {"gates", gates}};
}

CircuitSpec circuit_from_json(const Json &j) {
    CircuitSpec circuit;
    circuit.layout.number_qubits =
        j.at("layout").at("number_qubits").get<int>();
    circuit.layout.state_qubits = j.at("layout").at("state_qubits").get<int>();
    circuit.layout.validate();
    for (const auto &g : j.at("gates")) {
        std::vector<int> targets = g.value("targets", std::vector<int>{});
        std::vector<int> controls = g.value("controls", std::vector<int>{});
        if (g.contains("matrix")) {
            circuit.gates.push_back(GateOp{unitary_from_json(g.at("matrix")),
                                           std::move(targets),
                                           std::move(controls)});
            continue;
        }
        const std::string name = g.at("name").get<std::string>();
        if (name == "H") {
            circuit.gates.push_back(
                GateOp{h_gate(), std::move(targets), std::move(controls)});
        } else if (name == "X") {
            circuit.gates.push_back(
                GateOp{x_gate(), std::move(targets), std::move(controls)});
        } else if (name == "CPHASE" || name == "CCPHASE") {
            const double alpha = g.at("alpha").get<double>();
            const size_t want_controls = name == "CPHASE" ? 1 : 2;
            if (controls.size() != want_controls || targets.size() != 1) {
                throw IoError("circuit json: " + name + " needs " +
                              std::to_string(want_controls) +
                              " controls and one target");
            }
            circuit.gates.push_back(GateOp{phase_gate(alpha),
                                           std::move(targets),
                                           std::move(controls)});
        } else {
            throw IoError("circuit json: unknown gate name " + name);
        }
    }
    return circuit;
}

Json to_json(const VerifierInstance &instance) {
    return Json{{"matrix", to_json(instance.verifier)},
                {"input_qubits", instance.input_qubits},
                {"ancilla_qubits", instance.ancilla_qubits}};
}

VerifierInstance verifier_from_json(const Json &j) {
    VerifierInstance instance{unitary_from_json(j.at("matrix")),
                              j.at("input_qubits").get<int>(),
                              j.at("ancilla_qubits").get<int>()};
    instance.validate();
    return instance;
}

Json to_json(const SetSumSolution &solution) {
    return Json{{"axes", solution.axis_values},
                {"bijection", solution.bijection},
                {"residuals", solution.residuals}};
}

Json to_json(const PhaseSolution &solution) {
    return Json{{"axes", solution.axis_phases},
                {"bijection", solution.bijection},
                {"residuals", solution.residuals}};
}

Json to_json(const SignedGridMeasure &measure) {
    return Json{{"grid", measure.grid.dims},
                {"support", measure.support},
                {"weights", measure.weights},
                {"support_may_be_nonminimal", true}};
}

Json to_json(const RookPath &path) {
    return Json{{"turning_points", path.turning_points}};
}

std::string histogram_csv(const Histogram &histogram) {
    std::ostringstream out;
    out << "outcome,count\n";
    for (const auto &[outcome, count] : histogram.counts) {
        for (int b = histogram.register_width - 1; b >= 0; --b) {
            out << ((outcome >> b) & 1);
        }
        out << ',' << count << '\n';
    }
    return out.str();
}

std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    out << content;
    if (!out) {
        throw IoError("short write to " + path);
    }
}

Json read_json_file(const std::string &path) {
    return Json::parse(read_text_file(path));
}

} // namespace recurlab
