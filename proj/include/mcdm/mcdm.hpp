// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mcdm/analysis.hpp"
#include "mcdm/channel.hpp"
#include "mcdm/chirp_basis.hpp"
#include "mcdm/config.hpp"
#include "mcdm/constellation.hpp"
#include "mcdm/frame.hpp"
#include "mcdm/iq_io.hpp"
#include "mcdm/payload.hpp"
#include "mcdm/pn.hpp"
#include "mcdm/receiver.hpp"
#include "mcdm/results_io.hpp"
#include "mcdm/rng.hpp"
#include "mcdm/sweep.hpp"
#include "mcdm/theory.hpp"
#include "mcdm/transmitter.hpp"
#include "mcdm/types.hpp"
