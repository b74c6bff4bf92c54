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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "recurlab/cli_app.hpp"
#include "recurlab/recurrence.hpp"
#include "recurlab/report.hpp"
#include "recurlab/rng.hpp"
#include "recurlab/serialize.hpp"

using namespace recurlab;

namespace {

int run(const std::vector<std::string> &args) {
    std::vector<const char *> argv{"recurlab"};
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("recurlab_test_" + std::to_string(std::rand()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string &name) const {
        return (path / name).string();
    }
};

// Pull a named value out of a two-column (quantity, value) CSV.
double csv_quantity(const std::string &path, const std::string &name) {
    std::istringstream in(read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        if (comma != std::string::npos && line.substr(0, comma) == name) {
            return std::stod(line.substr(comma + 1));
        }
    }
    FAIL("quantity not found: " << name);
    return 0.0;
}

} // namespace

TEST_CASE("dispatch: usage errors exit with 2") {
    CHECK(run({}) == 2);
    CHECK(run({"recur", "--no-such-flag"}) == 2);
    CHECK(run({"definitely-not-a-subcommand"}) == 2);
}

TEST_CASE("dispatch: help exits 0") {
    CHECK(run({"--help"}) == 0);
}

TEST_CASE("dispatch: runtime failures exit with 1") {
    TempDir tmp;
    CHECK(run({"tensor-factor", "--values", tmp.file("missing.txt"),
               "--format", "2,2"}) == 1);
}

TEST_CASE("paper-numbers: reference quantities in the CSV output") {
    TempDir tmp;
    const std::string out = tmp.file("paper.csv");
    REQUIRE(run({"paper-numbers", "--out", out}) == 0);
    CHECK(std::abs(csv_quantity(out, "frac1_combinatorial") - 0.040569) <=
          1e-6);
    CHECK(std::abs(csv_quantity(out, "born_probability") - 1.0 / 607.59) <=
          1e-5);
    CHECK(csv_quantity(out, "detection_at_6000_runs") >= 0.999);
    CHECK(csv_quantity(out, "runs_for_999_confidence") == 4194);
    CHECK(std::abs(csv_quantity(out, "ec_approx(1)") - 0.193111809253) <=
          1e-9);
}

TEST_CASE("emit: empty table gives a header-only CSV") {
    TempDir tmp;
    ResultTable table;
    table.columns = {"a", "b"};
    Manifest manifest;
    manifest.subcommand = "unit";
    manifest.timestamp = Manifest::now_utc();
    const std::string path = tmp.file("empty.csv");
    emit(table, manifest, EmitFormat::Csv, path);
    const std::string data = data_bytes(path);
    CHECK(data.find("a,b\n") != std::string::npos);
    // No rows after the column header.
    CHECK(data.substr(data.size() - 4) == "a,b\n");
}

TEST_CASE("emit: rerunning a manifest reproduces the data bytes") {
    TempDir tmp;
    for (const std::string fmt : {"csv", "json"}) {
        const std::string out = tmp.file("run." + fmt);
        const std::vector<std::string> args = {
            "recur", "--factors", "1", "--number-qubits", "4",
            "--shots", "5000", "--seed", "99", "--conjugator", "haar",
            "--out", out, "--emit", fmt};
        REQUIRE(run(args) == 0);
        const std::string first = data_bytes(out);
        REQUIRE(run(args) == 0);
        CHECK(data_bytes(out) == first);
    }
}

TEST_CASE("emit: svg histogram buckets sum to the shot count") {
    TempDir tmp;
    const std::string svg = tmp.file("hist.svg");
    REQUIRE(run({"recur", "--factors", "1", "--number-qubits", "3",
                 "--shots", "100000", "--seed", "5", "--histogram-out",
                 svg}) == 0);
    const std::string content = read_text_file(svg);
    uint64_t total = 0;
    size_t pos = 0;
    while ((pos = content.find("data-count=\"", pos)) != std::string::npos) {
        pos += 12;
        total += std::stoull(content.substr(pos));
    }
    CHECK(total == 100000);
}

TEST_CASE("recur: CSV numbers are reproduced by direct library calls") {
    TempDir tmp;
    const std::string out = tmp.file("recur.csv");
    REQUIRE(run({"recur", "--factors", "1", "--theta-seed", "44",
                 "--conjugator", "haar:91", "--number-qubits", "4",
                 "--shots", "20000", "--seed", "3", "--out", out}) == 0);

    // Rebuild the same experiment against the library.
    const std::vector<double> thetas = sample_thetas(1, 44);
    const HiddenTensorUnitary ht = build_hidden_tensor(
        {cctheta_factor(thetas[0])}, haar_unitary(8, 91));
    RecurrenceInstance instance{ht.assembled, RegisterLayout{4, 3},
                                NoiseModel{0.0, derive_seed(3, "noise")}};
    const RecurrenceEstimate est =
        estimate_recurrence(instance, 20000, derive_seed(3, "shots"));

    std::istringstream in(read_text_file(out));
    std::string line;
    std::string data_line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#' &&
            line.rfind("instance_id", 0) != 0) {
            data_line = line;
        }
    }
    REQUIRE(!data_line.empty());
    std::vector<std::string> cells;
    std::istringstream row(data_line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
        cells.push_back(cell);
    }
    REQUIRE(cells.size() == 7);
    CHECK(std::stoull(cells[1]) == 20000);
    CHECK(std::stod(cells[2]) == doctest::Approx(est.probability).epsilon(1e-12));
    const OverlapProfile profile = overlap_profile(ht.assembled, 0);
    CHECK(std::stod(cells[4]) ==
          doctest::Approx(exact_recurrence_probability(profile, 4, true))
              .epsilon(1e-9));
    CHECK(std::stod(cells[5]) == doctest::Approx(7.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("config file: flags override config, config overrides defaults") {
    TempDir tmp;
    const std::string config = tmp.file("config.json");
    write_text_file(config, "{\"factors\": 1, \"number-qubits\": 3, "
                            "\"shots\": 4000, \"theta-seed\": 10}\n");
    const std::string out = tmp.file("cfg.csv");
    // --shots on the command line must beat the config's 4000.
    REQUIRE(run({"recur", "--config", config, "--shots", "6000", "--out",
                 out}) == 0);
    const std::string content = read_text_file(out);
    CHECK(content.find("# flag shots: 6000") != std::string::npos);
    CHECK(content.find("# flag factors: 1") != std::string::npos);
    std::istringstream in(content);
    std::string line;
    bool found_row = false;
    while (std::getline(in, line)) {
        if (line.rfind("cctheta", 0) == 0) {
            CHECK(line.find(",6000,") != std::string::npos);
            found_row = true;
        }
    }
    CHECK(found_row);
}

TEST_CASE("tensor-factor: exact solve and certified no-solution") {
    TempDir tmp;
    const std::string values = tmp.file("values.txt");
    write_text_file(values, "0\n1\n2\n3\n");
    const std::string out = tmp.file("witness.json");
    REQUIRE(run({"tensor-factor", "--values", values, "--format", "2,2",
                 "--mode", "exact", "--out", out}) == 0);
    Json doc = read_json_file(out);
    CHECK(doc.at("status") == "solved");
    CHECK(doc.at("witness").at("residuals").size() == 4);

    write_text_file(values, "0\n0\n0\n1\n");
    REQUIRE(run({"tensor-factor", "--values", values, "--format", "2,2",
                 "--mode", "exact", "--out", out}) == 0);
    doc = read_json_file(out);
    CHECK(doc.at("status") == "no_solution_certified");
}

TEST_CASE("tensor-factor: phase detection through a unitary file") {
    TempDir tmp;
    const UnitaryMatrix tensor =
        kron_unitary({haar_unitary(2, 8), haar_unitary(2, 9)});
    const std::string ufile = tmp.file("u.json");
    write_text_file(ufile, to_json(tensor).dump());
    const std::string out = tmp.file("verdict.json");
    REQUIRE(run({"tensor-factor", "--unitary", ufile, "--format", "2,2",
                 "--mode", "phase", "--out", out}) == 0);
    CHECK(read_json_file(out).at("status") == "yes");

    const UnitaryMatrix generic = haar_unitary(4, 10);
    write_text_file(ufile, to_json(generic).dump());
    REQUIRE(run({"tensor-factor", "--unitary", ufile, "--format", "2,2",
                 "--mode", "phase", "--out", out}) == 0);
    CHECK(read_json_file(out).at("status") == "no");
}

TEST_CASE("sternfeld: bound scan and rook-circuit verdicts") {
    TempDir tmp;
    const std::string out = tmp.file("scan.json");
    REQUIRE(run({"sternfeld", "--grid", "2,2", "--mode", "bound-scan",
                 "--out", out}) == 0);
    const Json scan = read_json_file(out);
    CHECK(scan.at("max_wrc_size") == 3);
    CHECK(scan.at("expected_p_plus_q_minus_1") == 3);

    const std::string sites = tmp.file("sites.txt");
    write_text_file(sites, "0 0\n0 1\n1 0\n1 1\n");
    REQUIRE(run({"sternfeld", "--grid", "2,2", "--sites", sites, "--mode",
                 "rc", "--out", out}) == 0);
    const Json rc = read_json_file(out);
    CHECK(rc.at("has_circuit") == true);
    CHECK(rc.at("circuit").at("turning_points").size() == 4);

    REQUIRE(run({"sternfeld", "--grid", "2,2", "--sites", sites, "--mode",
                 "wdsa", "--out", out}) == 0);
    const Json wdsa = read_json_file(out);
    CHECK(wdsa.at("is_wdsa") == false);
    CHECK(wdsa.at("witness_measure").at("support_may_be_nonminimal") ==
          true);
}

TEST_CASE("nusg: swap mode on state files") {
    TempDir tmp;
    Rng rng(70);
    Eigen::VectorXcd a(4);
    Eigen::VectorXcd b(4);
    for (Eigen::Index i = 0; i < 4; ++i) {
        a[i] = rng.complex_normal();
        b[i] = rng.complex_normal();
    }
    a.normalize();
    b.normalize();
    const QubitState sa{a};
    const QubitState sb{b};
    const std::string fa = tmp.file("a.json");
    const std::string fb = tmp.file("b.json");
    write_text_file(fa, to_json(sa).dump());
    write_text_file(fb, to_json(sb).dump());
    const std::string out = tmp.file("swap.json");
    REQUIRE(run({"nusg", "--mode", "swap", "--state-a", fa, "--state-b", fb,
                 "--shots", "20000", "--seed", "4", "--out", out}) == 0);
    const Json doc = read_json_file(out);
    CHECK(doc.at("satisfied") == true);
    CHECK(std::abs(doc.at("exact").get<double>() -
                   std::abs(a.dot(b))) <= 1e-12);
}

TEST_CASE("nusg: gap and case2 modes on a verifier file") {
    TempDir tmp;
    const std::string vfile = tmp.file("verifier.json");
    VerifierInstance instance{haar_unitary(16, 3141), 2, 2};
    write_text_file(vfile, to_json(instance).dump());

    const std::string out = tmp.file("nusg.json");
    REQUIRE(run({"nusg", "--verifier", vfile, "--mode", "gap", "--delta0",
                 "0.005", "--out", out}) == 0);
    const Json gap_doc = read_json_file(out);
    CHECK(gap_doc.contains("gap"));
    CHECK(gap_doc.contains("verdict"));

    REQUIRE(run({"nusg", "--verifier", vfile, "--mode", "case2", "--phi",
                 "0.7", "--epsilon", "0.0001", "--out", out}) == 0);
    const Json case2 = read_json_file(out);
    CHECK(case2.at("satisfied") == true);
}

TEST_CASE("tensor-factor: values derived from a matrix file") {
    TempDir tmp;
    // kron of diagonals gives an exactly factorable singular spectrum.
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
    a(0, 0) = 3.0;
    a(1, 1) = 1.5;
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(2, 2);
    b(0, 0) = 2.0;
    b(1, 1) = 0.5;
    const ComplexMatrix product =
        kron({ComplexMatrix(a), ComplexMatrix(b)});
    const std::string mfile = tmp.file("m.json");
    write_text_file(mfile, to_json(product).dump());
    const std::string out = tmp.file("w.json");
    REQUIRE(run({"tensor-factor", "--matrix", mfile, "--format", "2,2",
                 "--mode", "exact", "--out", out}) == 0);
    CHECK(read_json_file(out).at("status") == "solved");
}

TEST_CASE("sternfeld: labels and embed modes") {
    TempDir tmp;
    const std::string sites = tmp.file("sites.txt");
    write_text_file(sites, "0,0\n0,1\n0,2\n1,0\n");
    const std::string values = tmp.file("values.txt");
    write_text_file(values, "1.5\n0.25\n-0.75\n2.0\n");
    const std::string out = tmp.file("labels.json");
    REQUIRE(run({"sternfeld", "--grid", "2,3", "--sites", sites, "--mode",
                 "labels", "--values", values, "--out", out}) == 0);
    CHECK(read_json_file(out).at("solvable") == true);

    // Embedding a rank-4 matrix over the same WDSA.
    const UnitaryMatrix left = haar_unitary(4, 61);
    const UnitaryMatrix right = haar_unitary(5, 62);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 5);
    for (int i = 0; i < 4; ++i) {
        m += (1.0 + i) * left.mat().col(i) * right.mat().col(i).adjoint();
    }
    const std::string mfile = tmp.file("embed_m.json");
    write_text_file(mfile, to_json(ComplexMatrix(m)).dump());
    const std::string eout = tmp.file("embed.json");
    REQUIRE(run({"sternfeld", "--grid", "2,3", "--sites", sites, "--mode",
                 "embed", "--matrix", mfile, "--out", eout}) == 0);
    CHECK(read_json_file(eout).at("diagram_residual").get<double>() <= 1e-9);
}

TEST_CASE("nusg: case1 mode with the computed optimal witness") {
    TempDir tmp;
    const std::string vfile = tmp.file("v.json");
    // Identity verifier: the all-|1...> witness is accepted surely.
    VerifierInstance instance{UnitaryMatrix::identity(16), 2, 2};
    write_text_file(vfile, to_json(instance).dump());
    const std::string out = tmp.file("case1.json");
    REQUIRE(run({"nusg", "--verifier", vfile, "--mode", "case1", "--phi",
                 "0.3", "--epsilon", "0.0001", "--out", out}) == 0);
    const Json doc = read_json_file(out);
    CHECK(doc.at("acceptance").get<double>() >= 1.0 - 1e-9);
    CHECK(doc.at("satisfied") == true);
}

TEST_CASE("amplify: schedule output schema and determinism") {
    TempDir tmp;
    const std::string out = tmp.file("amp.csv");
    const std::vector<std::string> args = {
        "amplify", "--factors", "1", "--number-qubits", "4",
        "--auto-schedule", "--max-m", "4", "--shots", "5000",
        "--seed", "12", "--out", out};
    REQUIRE(run(args) == 0);
    const std::string first = data_bytes(out);
    CHECK(first.find("iterations,p_hat,stderr,predicted_sin2,theta") !=
          std::string::npos);
    // Rows for m = 1, 2, 4.
    int rows = 0;
    std::istringstream in(first);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#' && line.find("iterations") != 0) {
            ++rows;
            const double p = std::stod(line.substr(line.find(',') + 1));
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
        }
    }
    CHECK(rows == 3);
    REQUIRE(run(args) == 0);
    CHECK(data_bytes(out) == first);
}
