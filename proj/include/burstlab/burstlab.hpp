#pragma once

#include <burstlab/agents.hpp>
#include <burstlab/bessel.hpp>
#include <burstlab/binning.hpp>
#include <burstlab/burst_theory.hpp>
#include <burstlab/classifier.hpp>
#include <burstlab/durations.hpp>
#include <burstlab/error.hpp>
#include <burstlab/fbm.hpp>
#include <burstlab/fft.hpp>
#include <burstlab/io.hpp>
#include <burstlab/ks.hpp>
#include <burstlab/model.hpp>
#include <burstlab/powerlaw.hpp>
#include <burstlab/psd.hpp>
#include <burstlab/random.hpp>
#include <burstlab/sde.hpp>
#include <burstlab/series.hpp>
