#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <sensorsel/dmd.hpp>
#include <sensorsel/errors.hpp>
#include <sensorsel/format.hpp>
#include <sensorsel/io.hpp>

#include "oracles.hpp"

using namespace sensorsel;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sensorsel_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("identity file layout is exact") {
    const std::string expected =
        "# rows=2\n# cols=2\n# complex=false\n# kind=matrix\n"
        "1.0000000000000000e0,0.0000000000000000e0\n"
        "0.0000000000000000e0,1.0000000000000000e0\n";
    MatrixFile f;
    f.data = Eigen::MatrixXd::Identity(2, 2).eval();
    CHECK(format_matrix(f) == expected);
    const MatrixFile back = parse_matrix(expected);
    CHECK(std::get<Eigen::MatrixXd>(back.data) == Eigen::MatrixXd::Identity(2, 2));
    CHECK(format_matrix(back) == expected);
  }

  TEST_CASE("complex entries interleave") {
    Eigen::MatrixXcd z(1, 1);
    z(0, 0) = Complex(1.0, 2.0);
    MatrixFile f;
    f.data = z;
    const std::string text = format_matrix(f);
    CHECK(text.find("# complex=true\n") != std::string::npos);
    CHECK(text.find("\n1.0000000000000000e0,2.0000000000000000e0\n") != std::string::npos);
    CHECK(std::get<Eigen::MatrixXcd>(parse_matrix(text).data) == z);
  }

  TEST_CASE("bit-exact round trips through files and gzip") {
    const Eigen::MatrixXd m = oracle::random_matrix(7, 5, 3) * 1e-7;
    for (const char* name : {"m.csv", "m.csv.gz"}) {
      const fs::path path = scratch(name);
      save_matrix(path, m);
      CHECK(load_matrix(path) == m);
    }
    std::ifstream raw(scratch("m.csv.gz"), std::ios::binary);
    unsigned char magic[2] = {0, 0};
    raw.read(reinterpret_cast<char*>(magic), 2);
    CHECK(magic[0] == 0x1f);
    CHECK(magic[1] == 0x8b);

    const Eigen::MatrixXcd z = oracle::random_matrix(4, 3, 8).cast<Complex>() * Complex(0.3, -1.1);
    save_matrix(scratch("z.csv"), z);
    CHECK(std::get<Eigen::MatrixXcd>(load_matrix_file(scratch("z.csv")).data) == z);
    CHECK_THROWS_AS(load_matrix(scratch("z.csv")), ParseError);

    Basis basis(m, BasisKind::randomized, {{"seed", "4"}, {"oversample", "10"}});
    save_basis(scratch("b.csv"), basis);
    const Basis back = load_basis(scratch("b.csv"));
    CHECK(back.kind() == BasisKind::randomized);
    CHECK(back.real_modes() == m);
    CHECK(back.provenance().at("seed") == "4");

    save_matrix(scratch("v.csv"), Eigen::MatrixXd::Ones(1, 4).eval());
    CHECK(load_vector(scratch("v.csv")).size() == 4);
  }

  TEST_CASE("malformed files report the line") {
    const std::string short_row =
        "# rows=2\n# cols=3\n# complex=false\n# kind=matrix\n1,2,3\n4,5\n";
    try {
      parse_matrix(short_row);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 6);
      CHECK(std::string(e.what()).find("line 6") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_matrix("# rows=3\n# cols=1\n1\n2\n"), ParseError);
    CHECK_THROWS_AS(parse_matrix("# rows=1\n# cols=1\n# colour=red\n1\n"), ParseError);
    CHECK_THROWS_AS(parse_matrix("# rows=1\n# cols=1\nnan\n"), ParseError);
    CHECK_THROWS_AS(parse_matrix("# rows=1\n# cols=1\n1x\n"), ParseError);
    CHECK_THROWS_AS(parse_matrix("1,2\n"), ParseError);
    CHECK_THROWS_AS(load_matrix(scratch("does-not-exist.csv")), std::exception);
  }

  TEST_CASE("fuzzed inputs never escape as anything but parse errors") {
    MatrixFile f;
    f.data = oracle::random_matrix(4, 3, 1);
    f.metadata["note"] = "fuzz";
    const std::string good = format_matrix(f);
    std::mt19937_64 engine(17);
    const std::string alphabet = "0123456789.,-+eE#=\n abcxyz";
    for (int trial = 0; trial < 3000; ++trial) {
      std::string text = good;
      switch (trial % 3) {
        case 0:
          text.resize(engine() % (text.size() + 1));
          break;
        case 1:
          for (int k = 0; k < 3; ++k) text[engine() % text.size()] = alphabet[engine() % alphabet.size()];
          break;
        default:
          text.insert(engine() % text.size(), 1, alphabet[engine() % alphabet.size()]);
          break;
      }
      try {
        (void)parse_matrix(text);
      } catch (const ParseError&) {
      } catch (const InvalidArgument&) {
      }
    }
    for (int trial = 0; trial < 500; ++trial) {
      std::string text(engine() % 40, ' ');
      for (char& c : text) c = alphabet[engine() % alphabet.size()];
      try {
        (void)parse_index_list(text);
      } catch (const ParseError&) {
      }
    }
  }

  TEST_CASE("index lists") {
    CHECK(parse_index_list("3, 1 4\n# comment 9\n1,5") == std::vector<Index>{3, 1, 4, 1, 5});
    CHECK(parse_index_list("").empty());
    CHECK_THROWS_AS(parse_index_list("2,-1"), ParseError);
    CHECK_THROWS_AS(parse_index_list("2,x"), ParseError);
    write_text(scratch("idx.txt"), "0\n2\n");
    CHECK(load_index_list(scratch("idx.txt")) == std::vector<Index>{0, 2});
  }

  TEST_CASE("DMD models persist") {
    Eigen::MatrixXd x(3, 30);
    Eigen::Matrix3d a;
    a << 0.9, -0.2, 0.0, 0.2, 0.9, 0.0, 0.0, 0.0, 0.5;
    x.col(0) << 1.0, 0.5, -1.0;
    for (Index k = 1; k < 30; ++k) x.col(k) = a * x.col(k - 1);
    const DMDModel model = fit_dmd(x, 3, 0.25);
    const fs::path dir = scratch("dmd_model");
    fs::remove_all(dir);
    save_dmd_model(dir, model);
    for (const char* name : {"modes_re.csv", "modes_im.csv", "eigenvalues.csv", "meta.yaml"}) {
      CHECK(fs::exists(dir / name));
    }
    CHECK(read_text(dir / "eigenvalues.csv").rfind("re,im,omega_re,omega_im,amp_re,amp_im\n", 0) == 0);
    const DMDModel back = load_dmd_model(dir);
    CHECK(back.modes == model.modes);
    CHECK(back.lambda == model.lambda);
    CHECK(back.omega == model.omega);
    CHECK(back.amplitudes == model.amplitudes);
    CHECK(back.dt == model.dt);
    CHECK(back.snapshots == model.snapshots);
    CHECK((dmd_predict(back, 7) - dmd_predict(model, 7)).norm() == 0.0);
  }

  TEST_CASE("experiment configs") {
    const fs::path dir = scratch("config");
    fs::create_directories(dir);
    save_matrix(dir / "data.csv", oracle::random_matrix(10, 6, 2));
    save_matrix(dir / "cost.csv", Eigen::MatrixXd::Ones(10, 1).eval());
    write_text(dir / "allowed.txt", "0 1 2 3 4 5 6");
    const std::string yaml =
        "data: data.csv\n"
        "basis: {kind: randomized, rank: 4, oversample: 5}\n"
        "cost: cost.csv\n"
        "restrict: allowed.txt\n"
        "gammas: \"0:1:5\"\n"
        "p: 4\n"
        "trials: 20\n"
        "seed: 12\n"
        "output_dir: results\n";
    const ExperimentConfig cfg = parse_experiment_config(yaml, dir);
    CHECK(cfg.data == dir / "data.csv");
    CHECK(cfg.basis_kind == "randomized");
    CHECK(cfg.rank == 4);
    CHECK(cfg.oversample == 5);
    REQUIRE(cfg.gammas.size() == 5);
    CHECK(cfg.gammas[1] == 0.25);
    CHECK(cfg.p == 4);
    CHECK(cfg.trials == 20);
    CHECK(cfg.seed == 12);
    CHECK(cfg.cost.has_value());
    CHECK(cfg.restrict_to.has_value());
    CHECK(cfg.output_dir == dir / "results");

    const auto zero = parse_experiment_config("data: data.csv\ncost: {builtin: zero}\np: 2\n", dir);
    CHECK_FALSE(zero.cost.has_value());
    CHECK(zero.gammas == std::vector<double>{0.0});

    CHECK_THROWS_AS(parse_experiment_config("data: missing.csv\np: 2\n", dir), InvalidArgument);
    CHECK_THROWS_AS(parse_experiment_config("data: data.csv\np: 2\ncolour: red\n", dir), ParseError);
    CHECK_THROWS_AS(parse_experiment_config("data: [unclosed\n", dir), ParseError);
    CHECK_THROWS_AS(parse_experiment_config("data: data.csv\np: 0\n", dir), InvalidArgument);
    CHECK_THROWS_AS(parse_experiment_config("data: data.csv\np: 2\nbasis: {kind: fourier}\n", dir),
                    InvalidArgument);

    CHECK(parse_gamma_grid("0:2:3") == std::vector<double>{0.0, 1.0, 2.0});
    CHECK(parse_gamma_grid("0.5,4") == std::vector<double>{0.5, 4.0});
    CHECK_THROWS_AS(parse_gamma_grid("1:0:0"), InvalidArgument);
  }

  TEST_CASE("run manifests") {
    RunManifest m;
    m.command = "demo";
    m.name = "spring-mass";
    m.parameters = {{"N", "16"}, {"p", "6"}};
    m.seed = 42;
    m.version = std::string(library_version());
    m.outputs = {{"pareto.csv", digest("abc")}};
    const RunManifest back = parse_manifest(format_manifest(m));
    CHECK(back.command == m.command);
    CHECK(back.name == m.name);
    CHECK(back.parameters == m.parameters);
    CHECK(back.seed == 42);
    CHECK(back.version == m.version);
    CHECK(back.outputs == m.outputs);
    save_manifest(scratch("manifest.yaml"), m);
    CHECK(load_manifest(scratch("manifest.yaml")).outputs == m.outputs);

    CHECK(digest("") == "cbf29ce484222325");
    CHECK(digest("a") == "af63dc4c8601ec8c");
    CHECK_THROWS_AS(parse_manifest("seed: 1\n"), ParseError);
  }
}
