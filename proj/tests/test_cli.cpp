#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <sensorsel/balanced.hpp>
#include <sensorsel/io.hpp>
#include <sensorsel/reconstruction.hpp>

using namespace sensorsel;
namespace fs = std::filesystem;

namespace {

const fs::path kTmp = SENSORSEL_TEST_TMP;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(const std::string& args, const std::string& tag) {
  fs::create_directories(kTmp);
  const fs::path out = kTmp / (tag + ".stdout");
  const fs::path err = kTmp / (tag + ".stderr");
  const std::string cmd = std::string("\"") + SENSORSEL_CLI_PATH + "\" " + args + " > \"" + out.string() +
                          "\" 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_text(out);
  r.err = read_text(err);
  return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("select writes the pivot table") {
    const fs::path dir = kTmp / "select";
    fs::create_directories(dir);
    Eigen::MatrixXd psi(3, 2);
    psi << 1, 0, 0, 3, 2, 0;
    save_basis(dir / "basis.csv", Basis(psi, BasisKind::svd));
    const Run r = cli("select --basis " + q(dir / "basis.csv") + " --p 2 --out " + q(dir / "sel.csv"), "select");
    CHECK(r.code == 0);
    CHECK(read_text(dir / "sel.csv") ==
          "rank,index,cost\n0,1,0.0000000000000000e0\n1,2,0.0000000000000000e0\n");

    save_matrix(dir / "cost.csv", Eigen::MatrixXd(Eigen::Vector3d(0.0, 5.0, 0.0).transpose()));
    const Run c = cli("select --basis " + q(dir / "basis.csv") + " --p 2 --cost " + q(dir / "cost.csv") +
                          " --gamma 1 --out " + q(dir / "cost_sel.csv"),
                      "select_cost");
    CHECK(c.code == 0);
    CHECK(read_text(dir / "cost_sel.csv").find("\n0,2,") != std::string::npos);
  }

  TEST_CASE("omitted gamma equals gamma zero") {
    const fs::path dir = kTmp / "gamma";
    fs::create_directories(dir);
    save_basis(dir / "basis.csv", Basis(Eigen::MatrixXd::Random(12, 4).eval(), BasisKind::analytic));
    save_matrix(dir / "cost.csv", Eigen::MatrixXd::Ones(12, 1).eval());
    CHECK(cli("select --basis " + q(dir / "basis.csv") + " --p 4 --out " + q(dir / "a.csv"), "g1").code == 0);
    CHECK(cli("select --basis " + q(dir / "basis.csv") + " --p 4 --gamma 0 --out " + q(dir / "b.csv"), "g2").code == 0);
    CHECK(read_text(dir / "a.csv").substr(0, 40) == read_text(dir / "b.csv").substr(0, 40));
    const std::string a = read_text(dir / "a.csv");
    const std::string b = read_text(dir / "b.csv");
    CHECK(a == b);
  }

  TEST_CASE("restrict reproduces the actuator restriction") {
    const fs::path dir = kTmp / "restrict";
    fs::create_directories(dir);
    const auto sys = build_spring_mass(16);
    const BalancedModes bm = balance(gramians(sys), 8);
    save_basis(dir / "phi.csv", Basis(bm.phi, BasisKind::balanced_adjoint));
    std::string list;
    for (Index j : velocity_block(16)) list += std::to_string(j) + "\n";
    write_text(dir / "velocity.txt", list);
    const Run r = cli("select --basis " + q(dir / "phi.csv") + " --p 4 --restrict " + q(dir / "velocity.txt") +
                          " --out " + q(dir / "act.csv"),
                      "restrict");
    REQUIRE(r.code == 0);
    const Selection expected = select_actuators(bm, CostField::uniform(32), 4, velocity_block(16));
    std::string csv = "rank,index,cost\n";
    for (std::size_t k = 0; k < expected.indices.size(); ++k) {
      csv += std::to_string(k) + "," + std::to_string(expected.indices[k]) + ",0.0000000000000000e0\n";
    }
    CHECK(read_text(dir / "act.csv") == csv);
  }

  TEST_CASE("validation and failure exit codes") {
    const fs::path dir = kTmp / "errors";
    fs::create_directories(dir);
    save_basis(dir / "basis.csv", Basis(Eigen::MatrixXd::Identity(4, 2).eval(), BasisKind::svd));

    const Run p0 = cli("select --basis " + q(dir / "basis.csv") + " --p 0 --out " + q(dir / "x.csv"), "p0");
    CHECK(p0.code == 2);
    CHECK(p0.err.find("--p") != std::string::npos);

    const Run missing = cli("select --p 2", "missing");
    CHECK(missing.code == 2);
    CHECK(missing.err.find("--basis") != std::string::npos);

    write_text(dir / "garbled.csv", "# rows=2\n# cols=2\n1,2\n3\n");
    const Run garbled = cli("select --basis " + q(dir / "garbled.csv") + " --p 1 --out " + q(dir / "x.csv"), "garbled");
    CHECK(garbled.code == 2);
    CHECK(garbled.err.find("line 4") != std::string::npos);

    CHECK(cli("select --basis " + q(dir / "nope.csv") + " --p 1 --out " + q(dir / "x.csv"), "nofile").code == 2);
    CHECK(cli("demo nonsense", "unknown_demo").code == 2);
    CHECK(cli("", "nothing").code == 2);

    save_matrix(dir / "zeros.csv", Eigen::MatrixXd::Zero(5, 6).eval());
    const Run num = cli("basis --data " + q(dir / "zeros.csv") + " --kind dmd --rank 2 --out " + q(dir / "b.csv"), "num");
    CHECK(num.code == 3);
  }

  TEST_CASE("membrane demo with every analytic sensor is exact") {
    const fs::path dir = kTmp / "membrane55";
    const Run r = cli("demo membrane --p 55 --gammas 0:20:11 --trials 0 --set initial_conditions=5 --out-dir " + q(dir),
                      "membrane55");
    REQUIRE(r.code == 0);
    const std::string csv = read_text(dir / "pareto.csv");
    std::size_t rows = 0;
    for (char c : csv) rows += c == '\n';
    CHECK(rows == 12);
    const auto first = csv.substr(csv.find('\n') + 1);
    const auto fields = first.substr(0, first.find('\n'));
    const auto e0 = fields.find(',', fields.find(',') + 1) + 1;
    const double err = std::stod(fields.substr(e0, fields.find(',', e0) - e0));
    CHECK(err < 1e-8);
    for (const char* f : {"sensors.csv", "snapshot.csv", "manifest.yaml"}) CHECK(fs::exists(dir / f));
    CHECK(read_text(dir / "snapshot.csv").rfind("r,theta,u,uhat\n", 0) == 0);
  }

  TEST_CASE("demos are deterministic and replayable") {
    const fs::path a = kTmp / "dmd_a";
    const fs::path b = kTmp / "dmd_b";
    const std::string args = "demo dmd-synthetic --seed 7 --set max_rank=8 --set snapshots=120 ";
    REQUIRE(cli(args + "--out-dir " + q(a), "dmd_a").code == 0);
    REQUIRE(cli(args + "--out-dir " + q(b), "dmd_b").code == 0);
    for (const char* f : {"rank_sweep.csv", "reconstruction.csv", "sensors.csv", "model/eigenvalues.csv"}) {
      CHECK(read_text(a / f) == read_text(b / f));
    }
    const Run rep = cli("replay " + q(a / "manifest.yaml") + " --out-dir " + q(kTmp / "dmd_replay"), "dmd_replay");
    CHECK(rep.code == 0);
    CHECK(rep.out.find("identical") != std::string::npos);

    write_text(a / "sensors.csv", "tampered\n");
    const fs::path tampered = kTmp / "tampered";
    fs::create_directories(tampered);
    RunManifest m = load_manifest(a / "manifest.yaml");
    m.outputs["sensors.csv"] = digest("tampered\n");
    save_manifest(tampered / "manifest.yaml", m);
    const Run bad = cli("replay " + q(tampered / "manifest.yaml") + " --out-dir " + q(kTmp / "tampered_out"), "tampered");
    CHECK(bad.code == 1);
    CHECK(bad.out.find("sensors.csv") != std::string::npos);
  }

  TEST_CASE("spring-mass demo artifacts") {
    const fs::path dir = kTmp / "spring";
    const Run r = cli("demo spring-mass --set realizations=2 --trials 3 --gammas 0,10 --out-dir " + q(dir), "spring");
    REQUIRE(r.code == 0);
    for (const char* f : {"sensor_pareto.csv", "actuator_pareto.csv", "lqg_sensor_pareto.csv",
                          "lqg_actuator_pareto.csv", "lqg_random.csv", "enumeration.txt", "trajectory.csv"}) {
      CHECK(fs::exists(dir / f));
    }
    CHECK(read_text(dir / "trajectory.csv").rfind("t,x_3,xhat_3\n", 0) == 0);
    CHECK(read_text(dir / "enumeration.txt").find("actuator_subsets: 1820") != std::string::npos);
  }

  TEST_CASE("configured experiment and its replay") {
    const fs::path dir = kTmp / "experiment";
    fs::create_directories(dir);
    Eigen::MatrixXd x(30, 40);
    for (Index i = 0; i < 30; ++i) {
      for (Index k = 0; k < 40; ++k) {
        x(i, k) = std::sin(0.3 * i + 0.2 * k) + 0.5 * std::cos(0.11 * i * k) + 0.1 * std::sin(1.7 * i - 0.4 * k);
      }
    }
    save_matrix(dir / "data.csv", x);
    Eigen::VectorXd eta = Eigen::VectorXd::LinSpaced(30, 0.0, 1.0);
    save_matrix(dir / "cost.csv", Eigen::MatrixXd(eta));
    write_text(dir / "config.yaml",
               "data: data.csv\nbasis: {kind: svd, rank: 5}\ncost: cost.csv\ngammas: \"0:2:3\"\n"
               "p: 5\ntrials: 10\nseed: 3\noutput_dir: results\n");
    const Run r = cli("experiment " + q(dir / "config.yaml"), "experiment");
    REQUIRE(r.code == 0);
    for (const char* f : {"pareto.csv", "selection.csv", "basis.csv", "random.csv", "manifest.yaml"}) {
      CHECK(fs::exists(dir / "results" / f));
    }
    const Run rep = cli("replay " + q(dir / "results" / "manifest.yaml") + " --out-dir " + q(dir / "again"),
                        "experiment_replay");
    CHECK(rep.code == 0);
    CHECK(cli("experiment " + q(dir / "missing.yaml"), "experiment_missing").code == 2);
  }
}
