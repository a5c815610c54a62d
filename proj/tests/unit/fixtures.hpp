#pragma once

#include "secfbl/channel.hpp"
#include "secfbl/core_math.hpp"

namespace fixtures {

struct Instance {
  secfbl::ChannelRealization drop;
  secfbl::FblParams params;
};

inline Instance make(int n, int k, int m, std::uint64_t seed, double power_dbm = 20.0) {
  secfbl::ScenarioConfig cfg;
  cfg.antennas = n;
  cfg.users = k;
  cfg.eavesdroppers = m;
  cfg.seed = seed;
  Instance out{secfbl::generate_drop(cfg), {}};
  out.params.symbol_power = secfbl::dbm_to_watts(power_dbm);
  out.params.noise_user = out.params.noise_eve = out.drop.noise_power;
  return out;
}

}  // namespace fixtures
