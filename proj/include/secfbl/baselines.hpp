#pragma once

#include <string>

#include "secfbl/channel.hpp"
#include "secfbl/core_math.hpp"

namespace secfbl {

enum class BaselineKind { Mrt, Zf, Rzf, ZfEve, RzfEve };

std::string to_string(BaselineKind kind);

/// Stacked unit-norm linear precoder of the given kind.
///
/// ZF-type kinds invert [sqrt(gamma_k) h_k] (EVE kinds append the N - K strongest scaled wiretap
/// channels) and keep the user columns. Throws std::invalid_argument on dimension violations and
/// std::runtime_error on rank deficiency, naming the kind.
CVector baseline_precoder(BaselineKind kind, const ChannelRealization& channels, const FblParams& params);

/// Same with an explicit RZF regularizer (ignored by MRT and ZF kinds).
CVector baseline_precoder(BaselineKind kind, const ChannelRealization& channels, double regularizer);

/// Default RZF loading K sigma^2 / P.
double rzf_regularizer(const ChannelRealization& channels, const FblParams& params);

/// Indices of the wiretap channels used by the EVE kinds: descending gamma^e ||g||^2, ties to the lower index.
std::vector<int> strongest_eavesdroppers(const ChannelRealization& channels, int count);

}  // namespace secfbl
