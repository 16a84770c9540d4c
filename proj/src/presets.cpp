#include "gamtl/presets.hpp"

namespace gamtl {

namespace {

GamtlConfig with(double gamma, double alpha, double beta) {
  GamtlConfig c;
  c.gamma = gamma;
  c.graph_params.alpha = alpha;
  c.graph_params.beta = beta;
  return c;
}

}  // namespace

GamtlConfig syn1_preset() { return with(0.1, 10.0, 10.0); }

GamtlConfig syn2_preset() { return with(0.1, 10.0, 0.01); }

GamtlConfig wiener_preset() { return with(10.0, 0.1, 1.0); }

RbfOptions wiener_rbf_preset() {
  RbfOptions o;
  o.width_factor = 2.0;
  return o;
}

Json preset_run_config(const std::string& generator) {
  RunConfig rc;
  rc.data.generator = generator;
  if (generator == "syn1") {
    rc.model = syn1_preset();
  } else if (generator == "syn2") {
    rc.model = syn2_preset();
  } else if (generator == "wiener") {
    rc.model = wiener_preset();
    rc.rbf.options = wiener_rbf_preset();
    rc.bench.methods = {"gamtl", "rbf-gamtl"};
  } else {
    throw ConfigError("preset: expected syn1, syn2 or wiener");
  }
  return run_config_to_json(rc);
}

}  // namespace gamtl
