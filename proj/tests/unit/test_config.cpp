#include <catch2/catch_amalgamated.hpp>

#include "sbe/experiment/config.hpp"

using namespace sbe;

TEST_CASE("defaults and parsing", "[config]") {
  const ExperimentConfig d = parse_config(std::string(""));
  CHECK(d.velocity_dim == 1);
  CHECK(d.half_width == 8.0);
  CHECK(d.nodes_per_axis == 64);
  CHECK(d.cells == 64);
  CHECK(d.t_final == 20.0);
  CHECK(d.delta.has_value());
  CHECK(!d.dt.has_value());
  CHECK(d.effective_audit_every() == 10 * d.record_every);

  const ExperimentConfig c = parse_config(std::string(R"(
# comment line
velocity_dim = 2     # trailing comment
half_width=6.5
nodes_per_axis = 24
kernel = gaussian_bump
kappa_bar = 2.5
amplitude = -0.3
perturbation = 0.1
seed = 99
dt = 0.001
transport_order = muscl2
splitting = lie
integrator = euler
delta = auto
snapshots = false
)"));
  CHECK(c.velocity_dim == 2);
  CHECK(c.half_width == 6.5);
  CHECK(c.nodes_per_axis == 24);
  CHECK(c.kernel == KernelKind::gaussian_bump);
  CHECK(c.initial.kappa_bar == 2.5);
  CHECK(c.initial.amplitude == -0.3);
  CHECK(c.initial.seed == 99);
  CHECK(c.dt == 0.001);
  CHECK(c.transport_order == TransportOrder::muscl2);
  CHECK(c.splitting == Splitting::lie);
  CHECK(c.integrator == TimeIntegrator::euler);
  CHECK(!c.delta.has_value());
  CHECK(!c.snapshots);
}

TEST_CASE("format_config round trips", "[config]") {
  ExperimentConfig c;
  c.half_width = 7.123456789012345;
  c.kernel_scale = 0.1;
  c.initial.perturbation = 0.25;
  c.dt = 1.0 / 3.0;
  c.delta.reset();
  c.output_dir = "out/run1";
  const ExperimentConfig r = parse_config(format_config(c));
  CHECK(format_config(r) == format_config(c));
  CHECK(r.half_width == c.half_width);
  CHECK(r.dt == c.dt);
  CHECK(!r.delta.has_value());
}

TEST_CASE("invalid configs are rejected", "[config]") {
  CHECK_THROWS_AS(parse_config(std::string("colour = blue\n")), FormatError);
  CHECK_THROWS_AS(parse_config(std::string("cells = 8\ncells = 16\n")), FormatError);
  CHECK_THROWS_AS(parse_config(std::string("cells = many\n")), FormatError);
  CHECK_THROWS_AS(parse_config(std::string("half_width = 8x\n")), FormatError);
  CHECK_THROWS_AS(parse_config(std::string("kernel = hard_sphere\n")), FormatError);
  CHECK_THROWS_AS(parse_config(std::string("just a line\n")), FormatError);
  CHECK_THROWS_AS(parse_config(std::string("t_final = -1\n")), FormatError);
  CHECK_THROWS_AS(parse_config(std::string("record_every = 0\n")), FormatError);
  CHECK_THROWS_AS(parse_config(std::string("dt = 0\n")), FormatError);
  CHECK_THROWS_AS(parse_config(std::string("kernel = custom_table\n")), FormatError);
  CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), FormatError);
}

TEST_CASE("grid validation propagates from the config", "[config]") {
  ExperimentConfig c;
  c.nodes_per_axis = 15;
  CHECK_THROWS_AS(make_velocity_grid(c), InvalidArgument);
  c.nodes_per_axis = 16;
  c.half_width = 2.0;
  CHECK_THROWS_AS(make_velocity_grid(c), InvalidArgument);
}
