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
#include "recurlab/cli_app.hpp"

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "recurlab/amplify.hpp"
#include "recurlab/nusg.hpp"
#include "recurlab/report.hpp"
#include "recurlab/rng.hpp"
#include "recurlab/serialize.hpp"
#include "recurlab/sternfeld.hpp"
#include "recurlab/tensorfactor.hpp"

namespace recurlab {

namespace {

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(s);
    while (std::getline(in, part, sep)) {
        parts.push_back(part);
    }
    return parts;
}

std::vector<double> parse_doubles(const std::string &csv) {
    std::vector<double> out;
    for (const auto &p : split(csv, ',')) {
        out.push_back(std::stod(p));
    }
    return out;
}

std::vector<int> parse_ints(const std::string &csv) {
    std::vector<int> out;
    for (const auto &p : split(csv, ',')) {
        out.push_back(std::stoi(p));
    }
    return out;
}

/// One real per line; blank lines and '#' comments skipped.
std::vector<double> read_values_file(const std::string &path) {
    std::istringstream in(read_text_file(path));
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        values.push_back(std::stod(line));
    }
    return values;
}

/// One site per line, coordinates separated by spaces or commas.
std::vector<std::vector<int>> read_sites_file(const std::string &path) {
    std::istringstream in(read_text_file(path));
    std::vector<std::vector<int>> sites;
    std::string line;
    while (std::getline(in, line)) {
        for (char &c : line) {
            if (c == ',') {
                c = ' ';
            }
        }
        std::istringstream row(line);
        std::vector<int> site;
        int coord;
        while (row >> coord) {
            site.push_back(coord);
        }
        if (!site.empty()) {
            sites.push_back(std::move(site));
        }
    }
    return sites;
}

Manifest make_manifest(const CLI::App *sub, uint64_t seed) {
    Manifest m;
    m.subcommand = sub->get_name();
    m.master_seed = seed;
    m.timestamp = Manifest::now_utc();
    for (const CLI::Option *opt : sub->get_options()) {
        const std::string name = opt->get_name();
        if (name.rfind("--", 0) != 0) {
            continue;
        }
        // The effective value under the take-last merge policy.
        const std::string value = opt->count() > 0 ? opt->results().back()
                                                   : opt->get_default_str();
        m.flags[name.substr(2)] = value;
    }
    return m;
}

void deliver(const ResultTable &table, const Manifest &manifest,
             const std::string &out, const std::string &emit_name) {
    if (!out.empty()) {
        emit(table, manifest, emit_format_from_string(emit_name), out);
        std::cout << "wrote " << out << "\n";
        return;
    }
    std::cout << render_text(table);
}

void deliver_json(Json payload, const Manifest &manifest,
                  const std::string &out) {
    payload["manifest"] = {{"tool", "recurlab"},
                           {"version", manifest.version},
                           {"subcommand", manifest.subcommand},
                           {"seed", manifest.master_seed},
                           {"flags", manifest.flags},
                           {"timestamp", manifest.timestamp}};
    const std::string text = payload.dump(2) + "\n";
    if (!out.empty()) {
        write_text_file(out, text);
        std::cout << "wrote " << out << "\n";
        return;
    }
    std::cout << text;
}

// --------------------------------------------------------------------
// Shared instance construction for recur/amplify.

struct InstanceFlags {
    int factors = 3;
    std::string thetas;
    uint64_t theta_seed = 0;
    bool theta_seed_set = false;
    std::string conjugator = "haar";
    std::string unitary_file;
    int number_qubits = 10;
};

void add_instance_flags(CLI::App *sub, InstanceFlags *f) {
    sub->add_option("--factors", f->factors,
                    "number of CCtheta tensor factors")
        ->default_val("3");
    sub->add_option("--thetas", f->thetas,
                    "comma list of factor angles in turns");
    sub->add_option("--theta-seed", f->theta_seed,
                    "seed for random factor angles")
        ->default_val("0");
    sub->add_option("--conjugator", f->conjugator,
                    "identity | haar | haar:SEED")
        ->default_val("haar");
    sub->add_option("--unitary", f->unitary_file,
                    "matrix JSON to use instead of CCtheta factors");
    sub->add_option("--number-qubits", f->number_qubits,
                    "width j of the number register")
        ->default_val("10");
}

struct BuiltInstance {
    UnitaryMatrix u;
    std::vector<UnitaryMatrix> factors; // empty if a raw unitary was given
    std::string id;
};

BuiltInstance build_instance(const InstanceFlags &f, const CLI::App *sub,
                             uint64_t master) {
    if (!f.unitary_file.empty()) {
        UnitaryMatrix u = unitary_from_json(read_json_file(f.unitary_file));
        return BuiltInstance{std::move(u), {}, "file:" + f.unitary_file};
    }
    std::vector<double> thetas;
    if (!f.thetas.empty()) {
        thetas = parse_doubles(f.thetas);
        if (static_cast<int>(thetas.size()) != f.factors) {
            throw InvalidArgumentError(
                "recur: --thetas length must equal --factors");
        }
    } else {
        const uint64_t seed = sub->count("--theta-seed")
                                  ? f.theta_seed
                                  : derive_seed(master, "thetas");
        thetas = sample_thetas(f.factors, seed);
    }
    std::vector<UnitaryMatrix> factors;
    factors.reserve(thetas.size());
    Eigen::Index dim = 1;
    for (double t : thetas) {
        factors.push_back(cctheta_factor(t));
        dim *= 8;
    }
    std::optional<UnitaryMatrix> conjugator;
    std::string conj_id = f.conjugator;
    if (f.conjugator == "identity") {
        conjugator = std::nullopt;
    } else if (f.conjugator == "haar") {
        conjugator = haar_unitary(dim, derive_seed(master, "conjugator"));
    } else if (f.conjugator.rfind("haar:", 0) == 0) {
        conjugator = haar_unitary(
            dim, std::stoull(f.conjugator.substr(5)));
    } else {
        throw InvalidArgumentError("recur: unknown conjugator " +
                                   f.conjugator);
    }
    HiddenTensorUnitary ht = build_hidden_tensor(factors, conjugator);
    std::ostringstream id;
    id << "cctheta-x" << f.factors << "-" << conj_id;
    return BuiltInstance{std::move(ht.assembled), std::move(ht.factors),
                         id.str()};
}

// --------------------------------------------------------------------

int cmd_paper_numbers(const CLI::App *sub, uint64_t master,
                      const std::string &out, const std::string &emit_name,
                      int factor_count) {
    const std::vector<double> thetas =
        sample_thetas(factor_count, derive_seed(master, "thetas"));
    std::vector<UnitaryMatrix> factors;
    factors.reserve(thetas.size());
    for (double t : thetas) {
        factors.push_back(cctheta_factor(t));
    }
    const double frac1 = frac_period(factors, 1, 1e-9);
    const double closed = std::pow(7.0 / 8.0, factor_count);
    const double born = bias_to_born(frac1, 3 * factor_count);
    const double detect_6000 = detection_probability(born, 6000);
    const uint64_t runs999 = runs_for_confidence(born, 0.999);

    ResultTable table;
    table.columns = {"quantity", "value"};
    table.add_row({"frac1_combinatorial", format_double(frac1)});
    table.add_row({"frac1_closed_form", format_double(closed)});
    table.add_row({"born_probability", format_double(born)});
    table.add_row({"born_inverse", format_double(1.0 / born)});
    table.add_row({"detection_at_6000_runs", format_double(detect_6000)});
    table.add_row({"runs_for_999_confidence", format_count(runs999)});
    for (double z : {0.0, 1.0, 2.0, 6.0}) {
        table.add_row({"ec_approx(" + format_double(z) + ")",
                       format_double(ec_approx(z))});
    }
    deliver(table, make_manifest(sub, master), out, emit_name);
    return 0;
}

int cmd_recur(const CLI::App *sub, uint64_t master, const std::string &out,
              const std::string &emit_name, const InstanceFlags &flags,
              uint64_t shots, double noise_eps,
              const std::string &histogram_out) {
    BuiltInstance built = build_instance(flags, sub, master);
    int state_qubits = 0;
    for (Eigen::Index t = built.u.dim(); t > 1; t >>= 1) {
        ++state_qubits;
    }
    RecurrenceInstance instance{
        built.u,
        RegisterLayout{flags.number_qubits, state_qubits},
        NoiseModel{noise_eps, derive_seed(master, "noise")}};
    const Histogram hist =
        recurrence_histogram(instance, shots, derive_seed(master, "shots"));
    RecurrenceEstimate est;
    est.probability = static_cast<double>(hist.count_of(0)) /
                      static_cast<double>(shots);
    est.stderr_ = std::sqrt(est.probability * (1.0 - est.probability) /
                            static_cast<double>(shots));
    est.shots = shots;
    est.k_zero_included = true;

    if (!histogram_out.empty()) {
        const Manifest manifest = make_manifest(sub, master);
        if (histogram_out.size() > 4 &&
            histogram_out.substr(histogram_out.size() - 4) == ".svg") {
            ResultTable hist_table;
            hist_table.columns = {"outcome", "count"};
            for (const auto &[outcome, count] : hist.counts) {
                std::string bits;
                for (int b = hist.register_width - 1; b >= 0; --b) {
                    bits += static_cast<char>('0' + ((outcome >> b) & 1));
                }
                hist_table.add_row({bits, format_count(count)});
            }
            emit(hist_table, manifest, EmitFormat::SvgHistogram,
                 histogram_out);
        } else {
            write_text_file(histogram_out, histogram_csv(hist));
        }
    }

    const OverlapProfile profile = overlap_profile(built.u, 0);
    const double p_exact =
        exact_recurrence_probability(profile, flags.number_qubits, true);
    const double p_exact_no_k0 =
        exact_recurrence_probability(profile, flags.number_qubits, false);
    const double frac1 = built.factors.empty()
                             ? frac_period(built.u, 1, 1e-9)
                             : frac_period(built.factors, 1, 1e-9);
    const double born = bias_to_born(frac1, state_qubits);

    ResultTable table;
    table.columns = {"instance_id", "shots",  "p_hat",
                     "stderr",      "p_exact", "frac1",
                     "bias_born_prediction"};
    table.add_row({built.id, format_count(est.shots),
                   format_double(est.probability), format_double(est.stderr_),
                   format_double(p_exact), format_double(frac1),
                   format_double(born)});
    deliver(table, make_manifest(sub, master), out, emit_name);
    if (out.empty()) {
        std::cout << "mixture without the k=0 term: "
                  << format_double(p_exact_no_k0) << "\n";
    }
    return 0;
}

int cmd_haar_baseline(const CLI::App *sub, uint64_t master,
                      const std::string &out, const std::string &emit_name,
                      int state_qubits, uint64_t samples, int k_max) {
    if (state_qubits < 1 || state_qubits > 12) {
        throw SizingError("haar-baseline: state qubits must be in [1, 12]");
    }
    if (samples < 1 || k_max < 1) {
        throw InvalidArgumentError(
            "haar-baseline: samples and k-max must be >= 1");
    }
    const Eigen::Index dim = Eigen::Index{1} << state_qubits;
    uint64_t collected = 0;
    double sum_sq = 0.0;
    uint64_t draw = 0;
    while (collected < samples) {
        const UnitaryMatrix u =
            haar_unitary(dim, derive_seed(master, draw++));
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
        v[0] = 1.0;
        for (int k = 1; k <= k_max && collected < samples; ++k) {
            v = u.mat() * v;
            sum_sq += std::norm(v[0]);
            ++collected;
        }
    }
    const double rms = std::sqrt(sum_sq / static_cast<double>(collected));
    const double predicted =
        std::exp2(-0.5 * static_cast<double>(state_qubits));

    ResultTable table;
    table.columns = {"state_qubits", "samples", "k_max",
                     "rms_overlap",  "predicted", "ratio"};
    table.add_row({std::to_string(state_qubits), format_count(collected),
                   std::to_string(k_max), format_double(rms),
                   format_double(predicted), format_double(rms / predicted)});
    deliver(table, make_manifest(sub, master), out, emit_name);
    return 0;
}

int cmd_amplify(const CLI::App *sub, uint64_t master, const std::string &out,
                const std::string &emit_name, const InstanceFlags &flags,
                uint64_t shots, int iterations, bool auto_schedule,
                uint64_t max_m) {
    BuiltInstance built = build_instance(flags, sub, master);
    int state_qubits = 0;
    for (Eigen::Index t = built.u.dim(); t > 1; t >>= 1) {
        ++state_qubits;
    }
    RecurrenceInstance instance{
        built.u, RegisterLayout{flags.number_qubits, state_qubits},
        NoiseModel{}};

    const CircuitSpec circuit =
        recurrence_circuit(instance.u, instance.layout.number_qubits);
    const QubitState psi =
        run_circuit(circuit, QubitState::zero(instance.layout.total()));
    const AmplifierSetup setup = make_amplifier_setup(psi, instance.layout);

    std::vector<uint64_t> schedule;
    if (auto_schedule) {
        schedule = guess_schedule(max_m);
    } else {
        schedule.push_back(static_cast<uint64_t>(iterations));
    }

    ResultTable table;
    table.columns = {"iterations", "p_hat", "stderr", "predicted_sin2",
                     "theta"};
    for (uint64_t m : schedule) {
        const RecurrenceEstimate est = amplified_recurrence(
            instance, m, shots, derive_seed(master, m));
        table.add_row({format_count(m), format_double(est.probability),
                       format_double(est.stderr_),
                       format_double(amplified_detection_prediction(setup, m)),
                       format_double(setup.theta)});
    }
    deliver(table, make_manifest(sub, master), out, emit_name);
    return 0;
}

Budget parse_budget(const std::string &kind, double eps) {
    if (kind == "per-eq") {
        return Budget::per_equation(eps);
    }
    if (kind == "rms") {
        return Budget::rms(eps);
    }
    if (kind.rfind("fraction:", 0) == 0) {
        return Budget::fraction_of(eps, std::stod(kind.substr(9)));
    }
    throw InvalidArgumentError("tensor-factor: unknown budget kind " + kind);
}

int cmd_tensor_factor(const CLI::App *sub, uint64_t master,
                      const std::string &out, const std::string &values_file,
                      const std::string &matrix_file,
                      const std::string &unitary_file,
                      const std::string &format_axes, const std::string &mode,
                      const std::string &budget_kind, double phase_tol,
                      int cap) {
    TensorFormat format{parse_ints(format_axes)};
    format.validate();

    Json payload;
    payload["mode"] = mode;
    payload["format"] = format.axes;

    if (mode == "phase") {
        std::vector<double> phases;
        if (!unitary_file.empty()) {
            const UnitaryMatrix u =
                unitary_from_json(read_json_file(unitary_file));
            const TensorDetectVerdict verdict =
                detect_hidden_tensor_unitary(u, format, phase_tol);
            payload["status"] = verdict.is_tensor ? "yes" : "no";
            if (verdict.witness) {
                payload["witness"] = to_json(*verdict.witness);
            }
            deliver_json(payload, make_manifest(sub, master), out);
            return 0;
        }
        phases = read_values_file(values_file);
        const auto solution =
            solve_phase(PhaseSetSumInstance{phases, format, phase_tol});
        payload["status"] = solution ? "solved" : "no_filling";
        if (solution) {
            payload["witness"] = to_json(*solution);
        }
        deliver_json(payload, make_manifest(sub, master), out);
        return 0;
    }

    std::vector<double> values;
    if (!values_file.empty()) {
        values = read_values_file(values_file);
    } else if (!matrix_file.empty()) {
        const ComplexMatrix m =
            complex_matrix_from_json(read_json_file(matrix_file));
        values = log_values_from_singulars(svd(m).singulars);
    } else if (!unitary_file.empty()) {
        throw InvalidArgumentError(
            "tensor-factor: use --mode phase with --unitary (eigenphases "
            "have no canonical logarithm)");
    } else {
        throw InvalidArgumentError(
            "tensor-factor: need --values or --matrix input");
    }

    SetSumInstance instance{values, format, Budget::exact()};
    std::optional<SetSumSolution> solution;
    if (mode == "exact") {
        solution = solve_exact(instance, cap);
        payload["status"] = solution ? "solved" : "no_solution_certified";
    } else if (mode == "greedy") {
        solution = solve_greedy(instance);
        payload["status"] = solution ? "solved" : "failure";
    } else if (mode.rfind("approx:", 0) == 0) {
        const double eps = std::stod(mode.substr(7));
        instance.budget = parse_budget(budget_kind, eps);
        solution = solve_approx(instance);
        payload["status"] = solution ? "solved" : "failure";
    } else {
        throw InvalidArgumentError("tensor-factor: unknown mode " + mode);
    }
    if (solution) {
        payload["witness"] = to_json(*solution);
    }
    deliver_json(payload, make_manifest(sub, master), out);
    return 0;
}

int cmd_sternfeld(const CLI::App *sub, uint64_t master,
                  const std::string &out, const std::string &grid_arg,
                  const std::string &sites_file, const std::string &mode,
                  const std::string &values_file,
                  const std::string &matrix_file) {
    Json payload;
    payload["mode"] = mode;

    if (mode == "bound-scan") {
        const std::vector<int> dims = parse_ints(grid_arg);
        if (dims.size() != 2) {
            throw InvalidArgumentError("bound-scan: grid must be 2D");
        }
        const WrcBoundReport report = check_wrc_bound(dims[0], dims[1]);
        payload["p"] = report.p;
        payload["q"] = report.q;
        payload["max_wrc_size"] = report.max_wrc_size;
        payload["expected_p_plus_q_minus_1"] = report.p + report.q - 1;
        payload["subsets_checked"] = report.subsets_checked;
        payload["witness_sites"] = report.witness.sites;
        deliver_json(payload, make_manifest(sub, master), out);
        return 0;
    }

    GridSubset subset;
    subset.grid.dims = parse_ints(grid_arg);
    subset.sites = read_sites_file(sites_file);
    subset.validate();

    if (mode == "rc") {
        const auto path = find_rook_circuit(subset);
        payload["has_circuit"] = path.has_value();
        payload["is_wrc"] = !path.has_value();
        if (path) {
            payload["circuit"] = to_json(*path);
        }
    } else if (mode == "wdsa") {
        const bool wdsa = is_wdsa(subset);
        payload["is_wdsa"] = wdsa;
        if (!wdsa) {
            const auto witness = wdsa_witness(subset);
            if (witness) {
                payload["witness_measure"] = to_json(*witness);
            }
        }
    } else if (mode == "labels") {
        const std::vector<double> values = read_values_file(values_file);
        const auto labels = solve_labels_on_subset(subset, values);
        payload["solvable"] = labels.has_value();
        if (labels) {
            payload["labels"] = *labels;
        }
    } else if (mode == "embed") {
        const ComplexMatrix m =
            complex_matrix_from_json(read_json_file(matrix_file));
        const PartialTensorEmbedding embedding =
            partial_tensor_embed(m, subset);
        payload["diagram_residual"] = embedding.diagram_residual;
        payload["site_order"] = embedding.site_order;
        Json singulars = Json::array();
        for (const auto &axis : embedding.factor_singulars) {
            Json list = Json::array();
            for (Eigen::Index i = 0; i < axis.size(); ++i) {
                list.push_back(axis[i]);
            }
            singulars.push_back(list);
        }
        payload["factor_singulars"] = singulars;
    } else {
        throw InvalidArgumentError("sternfeld: unknown mode " + mode);
    }
    deliver_json(payload, make_manifest(sub, master), out);
    return 0;
}

int cmd_nusg(const CLI::App *sub, uint64_t master, const std::string &out,
             const std::string &verifier_file, const std::string &mode,
             double phi, double epsilon, double delta0,
             const std::string &witness_file, const std::string &state_a_file,
             const std::string &state_b_file, uint64_t shots) {
    Json payload;
    payload["mode"] = mode;

    if (mode == "swap") {
        const QubitState a = state_from_json(read_json_file(state_a_file));
        const QubitState b = state_from_json(read_json_file(state_b_file));
        const SwapTestEstimate est =
            swap_test_estimate(a, b, shots, derive_seed(master, "swap"));
        const double exact = std::abs(a.amplitudes().dot(b.amplitudes()));
        payload["estimate"] = est.estimate;
        payload["exact"] = exact;
        payload["p0_hat"] = est.p0_hat;
        payload["stderr"] = est.stderr_;
        payload["satisfied"] =
            std::abs(est.estimate - exact) <= 3.0 * est.stderr_ + 1e-3;
        deliver_json(payload, make_manifest(sub, master), out);
        return 0;
    }

    const VerifierInstance instance =
        verifier_from_json(read_json_file(verifier_file));
    const NusgParams params{phi, epsilon, delta0};

    if (mode == "gap") {
        const double gap = gap_around_one(instance.verifier);
        const NusgVerdict verdict = nusg_decide(instance.verifier, delta0);
        payload["gap"] = gap;
        payload["delta0"] = delta0;
        payload["verdict"] = verdict == NusgVerdict::Member ? "member"
                             : verdict == NusgVerdict::NonMemberAtTenDelta
                                 ? "non-member-at-10-delta0"
                                 : "undetermined";
    } else if (mode == "case1") {
        QubitState witness =
            witness_file.empty()
                ? max_acceptance(instance).witness
                : state_from_json(read_json_file(witness_file));
        const double accept = acceptance_probability(instance, witness);
        const double eps_used = std::max(epsilon, 1.0 - accept);
        NusgParams case1_params{phi, epsilon, delta0};
        const double residual =
            residual_case1(instance, witness, case1_params);
        const double bound = 2.0 * std::sqrt(eps_used);
        payload["acceptance"] = accept;
        payload["residual"] = residual;
        payload["bound"] = bound;
        payload["satisfied"] = residual <= bound + 1e-9;
    } else if (mode == "case2") {
        params.validate();
        const MaxAcceptance best = max_acceptance(instance);
        const ZCircuit zc = build_z(instance, params);
        const double gap = gap_around_one(zc.z);
        const double bound =
            std::sin(phi) - 2.0 * std::sqrt(best.eps_star);
        payload["eps_star"] = best.eps_star;
        payload["gap"] = gap;
        payload["bound"] = bound;
        payload["satisfied"] = gap >= bound - 1e-9;
    } else {
        throw InvalidArgumentError("nusg: unknown mode " + mode);
    }
    deliver_json(payload, make_manifest(sub, master), out);
    return 0;
}

/// Insert config-file values as tokens right after the subcommand so
/// explicit flags (later tokens, take-last policy) override them.
std::vector<std::string> merge_config_tokens(int argc,
                                             const char *const *argv) {
    std::vector<std::string> tokens;
    for (int i = 0; i < argc; ++i) {
        tokens.emplace_back(argv[i]);
    }
    std::string config_path;
    for (size_t i = 1; i < tokens.size(); ++i) {
        if (tokens[i] == "--config" && i + 1 < tokens.size()) {
            config_path = tokens[i + 1];
        } else if (tokens[i].rfind("--config=", 0) == 0) {
            config_path = tokens[i].substr(9);
        }
    }
    if (config_path.empty()) {
        return tokens;
    }
    const Json config = read_json_file(config_path);
    if (!config.is_object()) {
        throw IoError("config file must hold a JSON object of flag values");
    }
    size_t sub_pos = 0;
    for (size_t i = 1; i < tokens.size(); ++i) {
        if (tokens[i].rfind("-", 0) != 0) {
            sub_pos = i;
            break;
        }
    }
    if (sub_pos == 0) {
        return tokens;
    }
    std::vector<std::string> merged(tokens.begin(),
                                    tokens.begin() + sub_pos + 1);
    for (const auto &[key, value] : config.items()) {
        std::string text;
        if (value.is_string()) {
            text = value.get<std::string>();
        } else {
            text = value.dump();
        }
        merged.push_back("--" + key + "=" + text);
    }
    merged.insert(merged.end(), tokens.begin() + sub_pos + 1, tokens.end());
    return merged;
}

} // namespace

int run_cli(int argc, const char *const *argv) {
    CLI::App app{"recurlab: recurrence detection and spectral factorization "
                 "experiments"};
    app.require_subcommand(0, 1);

    uint64_t master = 1;
    std::string out;
    std::string emit_name = "csv";
    std::string config_path;

    auto add_common = [&](CLI::App *sub) {
        sub->option_defaults()->multi_option_policy(
            CLI::MultiOptionPolicy::TakeLast);
        sub->add_option("--seed", master, "master seed")->default_val("1");
        sub->add_option("--out", out, "output file path");
        sub->add_option("--emit", emit_name, "csv | json | svg-histogram")
            ->default_val("csv");
        sub->add_option("--config", config_path,
                        "JSON file of flag defaults (flags override)");
    };

    // paper-numbers
    auto *pn = app.add_subcommand(
        "paper-numbers", "closed-form reference quantities of the 72-qubit "
                         "CCtheta example");
    int pn_factors = 24;
    add_common(pn);
    pn->add_option("--factors", pn_factors, "number of CCtheta factors")
        ->default_val("24");

    // recur
    auto *rc = app.add_subcommand(
        "recur", "Monte Carlo recurrence detection on a hidden-tensor or "
                 "supplied unitary");
    InstanceFlags rc_flags;
    uint64_t rc_shots = 200000;
    double rc_noise = 0.0;
    add_common(rc);
    add_instance_flags(rc, &rc_flags);
    rc->add_option("--shots", rc_shots, "measurement shots")
        ->default_val("200000");
    rc->add_option("--noise-eps", rc_noise,
                   "per-gate expected state deviation")
        ->default_val("0");
    std::string rc_hist_out;
    rc->add_option("--histogram-out", rc_hist_out,
                   "write the outcome histogram (.csv or .svg)");

    // haar-baseline
    auto *hb = app.add_subcommand("haar-baseline",
                                  "overlap statistics of Haar-random "
                                  "unitaries against the sqrt law");
    int hb_qubits = 10;
    uint64_t hb_samples = 1000;
    int hb_kmax = 40;
    add_common(hb);
    hb->add_option("--state-qubits", hb_qubits, "register width n")
        ->default_val("10");
    hb->add_option("--samples", hb_samples, "number of (U, k) samples")
        ->default_val("1000");
    hb->add_option("--k-max", hb_kmax, "largest power per unitary")
        ->default_val("40");

    // amplify
    auto *am = app.add_subcommand(
        "amplify", "amplitude amplification of the recurrence signal");
    InstanceFlags am_flags;
    uint64_t am_shots = 20000;
    int am_iterations = 1;
    bool am_auto = false;
    uint64_t am_max_m = 64;
    add_common(am);
    add_instance_flags(am, &am_flags);
    am->add_option("--shots", am_shots, "measurement shots")
        ->default_val("20000");
    am->add_option("--iterations", am_iterations, "Grover iterations m")
        ->default_val("1");
    am->add_flag("--auto-schedule", am_auto,
                 "run the geometric guess schedule instead of a fixed m");
    am->add_option("--max-m", am_max_m, "schedule bound")->default_val("64");

    // tensor-factor
    auto *tf = app.add_subcommand(
        "tensor-factor", "set-sum factorization of spectra (additive or "
                         "circular)");
    std::string tf_values, tf_matrix, tf_unitary, tf_format = "2,2";
    std::string tf_mode = "exact", tf_budget = "per-eq";
    double tf_tol = 1e-6;
    int tf_cap = 12;
    add_common(tf);
    tf->add_option("--values", tf_values, "file of reals, one per line");
    tf->add_option("--matrix", tf_matrix,
                   "matrix JSON; values = log singular values");
    tf->add_option("--unitary", tf_unitary,
                   "unitary JSON; eigenphases, --mode phase");
    tf->add_option("--format", tf_format, "axis sizes k1,k2,...")
        ->default_val("2,2");
    tf->add_option("--mode", tf_mode, "exact | greedy | approx:EPS | phase")
        ->default_val("exact");
    tf->add_option("--budget", tf_budget,
                   "approx budget kind: per-eq | rms | fraction:F")
        ->default_val("per-eq");
    tf->add_option("--tol", tf_tol, "phase-mode angular tolerance")
        ->default_val("1e-6");
    tf->add_option("--cap", tf_cap, "exhaustive-mode size cap")
        ->default_val("12");

    // sternfeld
    auto *sf = app.add_subcommand(
        "sternfeld", "rook circuits, vanishing-marginal measures, label "
                     "systems and partial tensor embeddings");
    std::string sf_grid = "2,2", sf_sites, sf_mode = "rc", sf_values,
                sf_matrix;
    add_common(sf);
    sf->add_option("--grid", sf_grid, "grid sizes p,q[,r...]")
        ->default_val("2,2");
    sf->add_option("--sites", sf_sites, "file of sites, one tuple per line");
    sf->add_option("--mode", sf_mode,
                   "rc | wdsa | labels | embed | bound-scan")
        ->default_val("rc");
    sf->add_option("--values", sf_values, "labels mode: one real per site");
    sf->add_option("--matrix", sf_matrix, "embed mode: matrix JSON");

    // nusg
    auto *ng = app.add_subcommand(
        "nusg", "spectral gap instances Z = H U' Y U V H from toy verifiers");
    std::string ng_verifier, ng_mode = "gap", ng_witness, ng_a, ng_b;
    double ng_phi = 0.3, ng_eps = 1e-4, ng_delta0 = 0.005;
    uint64_t ng_shots = 10000;
    add_common(ng);
    ng->add_option("--verifier", ng_verifier, "verifier JSON file");
    ng->add_option("--mode", ng_mode, "gap | case1 | case2 | swap")
        ->default_val("gap");
    ng->add_option("--phi", ng_phi, "phase angle")->default_val("0.3");
    ng->add_option("--epsilon", ng_eps, "promise epsilon")
        ->default_val("1e-4");
    ng->add_option("--delta0", ng_delta0, "gap threshold")
        ->default_val("0.005");
    ng->add_option("--witness", ng_witness, "case1 witness state JSON");
    ng->add_option("--state-a", ng_a, "swap mode state JSON");
    ng->add_option("--state-b", ng_b, "swap mode state JSON");
    ng->add_option("--shots", ng_shots, "swap test shots")
        ->default_val("10000");

    std::vector<std::string> tokens;
    try {
        tokens = merge_config_tokens(argc, argv);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::vector<const char *> cargv;
    cargv.reserve(tokens.size());
    for (const auto &t : tokens) {
        cargv.push_back(t.c_str());
    }

    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    if (app.get_subcommands().empty()) {
        std::cout << app.help();
        return 2;
    }

    try {
        const CLI::App *sub = app.get_subcommands().front();
        if (sub == pn) {
            return cmd_paper_numbers(pn, master, out, emit_name, pn_factors);
        }
        if (sub == rc) {
            return cmd_recur(rc, master, out, emit_name, rc_flags, rc_shots,
                             rc_noise, rc_hist_out);
        }
        if (sub == hb) {
            return cmd_haar_baseline(hb, master, out, emit_name, hb_qubits,
                                     hb_samples, hb_kmax);
        }
        if (sub == am) {
            return cmd_amplify(am, master, out, emit_name, am_flags, am_shots,
                               am_iterations, am_auto, am_max_m);
        }
        if (sub == tf) {
            return cmd_tensor_factor(tf, master, out, tf_values, tf_matrix,
                                     tf_unitary, tf_format, tf_mode,
                                     tf_budget, tf_tol, tf_cap);
        }
        if (sub == sf) {
            return cmd_sternfeld(sf, master, out, sf_grid, sf_sites, sf_mode,
                                 sf_values, sf_matrix);
        }
        if (sub == ng) {
            return cmd_nusg(ng, master, out, ng_verifier, ng_mode, ng_phi,
                            ng_eps, ng_delta0, ng_witness, ng_a, ng_b,
                            ng_shots);
        }
        std::cerr << "error: unknown subcommand\n";
        return 2;
    } catch (const RecurlabError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace recurlab
