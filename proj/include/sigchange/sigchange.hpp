#ifndef SIGCHANGE_SIGCHANGE_HPP
#define SIGCHANGE_SIGCHANGE_HPP

#include "sigchange/errors.hpp"
#include "sigchange/explicit_embed.hpp"
#include "sigchange/expression.hpp"
#include "sigchange/finite_difference.hpp"
#include "sigchange/metric_core.hpp"
#include "sigchange/minkowski_embed.hpp"
#include "sigchange/misner.hpp"
#include "sigchange/numeric_config.hpp"
#include "sigchange/quadrature.hpp"
#include "sigchange/root_finding.hpp"
#include "sigchange/transversality.hpp"
#include "sigchange/types.hpp"
#include "sigchange/verification.hpp"

#endif  // SIGCHANGE_SIGCHANGE_HPP
