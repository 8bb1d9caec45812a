#ifndef REINSURE_REINSURE_HPP
#define REINSURE_REINSURE_HPP

#include "reinsure/coefficient.hpp"
#include "reinsure/models.hpp"
#include "reinsure/numerics.hpp"
#include "reinsure/closedform.hpp"
#include "reinsure/simengine.hpp"
#include "reinsure/verify.hpp"
#include "reinsure/config.hpp"
#include "reinsure/commands.hpp"

#endif  // REINSURE_REINSURE_HPP
