#pragma once

// isar.hpp - umbrella header for the ISAC SAR toolkit.

#include "isar/analysis.hpp"
#include "isar/channel.hpp"
#include "isar/chirp.hpp"
#include "isar/compression.hpp"
#include "isar/config.hpp"
#include "isar/constellation.hpp"
#include "isar/emulation.hpp"
#include "isar/fft.hpp"
#include "isar/focusing.hpp"
#include "isar/geometry.hpp"
#include "isar/io.hpp"
#include "isar/link_budget.hpp"
#include "isar/ofdm.hpp"
#include "isar/parallel.hpp"
#include "isar/rng.hpp"
#include "isar/types.hpp"
#include "isar/version.hpp"
