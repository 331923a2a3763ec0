// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "covcut/channelgen.hpp"
#include "covcut/matcore.hpp"

using namespace covcut;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) {
    path = (std::filesystem::temp_directory_path() / name).string();
  }
  ~TempFile() { std::remove(path.c_str()); }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("single-path covariance is rank one and unit Frobenius", "[channelgen]") {
  SyntheticChannelConfig cfg;
  cfg.antennas = 8;
  cfg.paths = 1;
  cfg.seed = 5;
  const HermitianMatrix c = synth_covariance(cfg);
  REQUIRE(c.frobenius_norm() == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(rank_estimate(c) == 1);
  REQUIRE(c.psd());
}

TEST_CASE("many spread paths give a full-rank covariance", "[channelgen]") {
  SyntheticChannelConfig cfg;
  cfg.antennas = 6;
  cfg.paths = 6;
  cfg.angle_spread_deg = 180.0;
  cfg.seed = 11;
  const HermitianMatrix c = synth_covariance(cfg);
  REQUIRE(rank_estimate(c) == 6);
}

TEST_CASE("synthetic generation is deterministic in the seed", "[channelgen]") {
  SyntheticChannelConfig cfg;
  cfg.seed = 1234;
  const HermitianMatrix a = synth_covariance(cfg);
  const HermitianMatrix b = synth_covariance(cfg);
  REQUIRE((a.dense() - b.dense()).norm() == 0.0);
  cfg.seed = 1235;
  REQUIRE((a.dense() - synth_covariance(cfg).dense()).norm() > 1e-6);
}

TEST_CASE("rank_target truncates the spectrum", "[channelgen]") {
  SyntheticChannelConfig cfg;
  cfg.antennas = 8;
  cfg.paths = 6;
  cfg.angle_spread_deg = 120.0;
  cfg.rank_target = 2;
  cfg.seed = 21;
  const HermitianMatrix c = synth_covariance(cfg);
  REQUIRE(rank_estimate(c) == 2);
  REQUIRE(c.frobenius_norm() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("save/load round-trip preserves entries", "[channelgen]") {
  SyntheticChannelConfig cfg;
  cfg.antennas = 5;
  cfg.paths = 3;
  cfg.seed = 33;
  const HermitianMatrix c = synth_covariance(cfg);
  TempFile file("covcut_roundtrip.csv");
  save_covariance(file.path, c, /*normalized=*/true);
  const HermitianMatrix back = load_covariance(file.path, 5);
  REQUIRE((back.dense() - c.dense()).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("load accepts a hand-written identity file", "[channelgen]") {
  TempFile file("covcut_identity.csv");
  std::string body = "dim,4,normalized,0\n";
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      body += std::to_string(i) + "," + std::to_string(j) + "," + (i == j ? "0.5" : "0") + ",0\n";
    }
  }
  write_file(file.path, body);
  const HermitianMatrix c = load_covariance(file.path, 4);
  REQUIRE((c.dense() - 0.5 * ComplexMatrix::Identity(4, 4)).norm() <= 1e-15);
}

TEST_CASE("normalized header flag rescales on load", "[channelgen]") {
  TempFile file("covcut_norm.csv");
  std::string body = "dim,2,normalized,1\n";
  body += "0,0,2,0\n0,1,0,0\n1,0,0,0\n1,1,2,0\n";
  write_file(file.path, body);
  const HermitianMatrix c = load_covariance(file.path, 2);
  REQUIRE(c.frobenius_norm() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("load failure modes carry distinct error codes", "[channelgen]") {
  TempFile file("covcut_bad.csv");

  write_file(file.path, "bogus header\n");
  REQUIRE_THROWS_MATCHES(load_covariance(file.path), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == errc::parse_error; }));

  write_file(file.path, "dim,2,normalized,0\n0,0,1,0\n0,1,0,0\n1,0,0,0\n");  // missing entry
  REQUIRE_THROWS_MATCHES(load_covariance(file.path), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == errc::dimension_mismatch; }));

  write_file(file.path, "dim,2,normalized,0\n0,0,1,0\n0,1,0.5,0\n1,0,0.1,0\n1,1,1,0\n");
  REQUIRE_THROWS_MATCHES(load_covariance(file.path), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == errc::not_hermitian; }));

  write_file(file.path, "dim,2,normalized,0\n0,0,-1,0\n0,1,0,0\n1,0,0,0\n1,1,1,0\n");
  REQUIRE_THROWS_MATCHES(load_covariance(file.path), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == errc::not_psd; }));

  write_file(file.path, "dim,3,normalized,0\n");
  REQUIRE_THROWS_MATCHES(load_covariance(file.path, 5), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == errc::dimension_mismatch; }));

  REQUIRE_THROWS_MATCHES(load_covariance("/nonexistent/covcut.csv"), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == errc::io_error; }));
}

TEST_CASE("emitted covariances are PSD within tolerance", "[channelgen]") {
  Rng seeds(3);
  for (int rep = 0; rep < 10; ++rep) {
    SyntheticChannelConfig cfg;
    cfg.antennas = 4 + (rep % 4);
    cfg.paths = 1 + (rep % 5);
    cfg.angle_spread_deg = 10.0 + 15.0 * (rep % 6);
    cfg.seed = seeds.next_u64();
    const HermitianMatrix c = synth_covariance(cfg);
    const EigDecomposition eig = hermitian_eig(c);
    REQUIRE(eig.eigenvalues.minCoeff() >= -1e-10 * eig.eigenvalues.maxCoeff());
    REQUIRE(c.frobenius_norm() == Catch::Approx(1.0).margin(1e-12));
  }
}
