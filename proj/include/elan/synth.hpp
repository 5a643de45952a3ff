#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "elan/morse.hpp"

namespace elan::synth {

struct Event {
  double t = 0.0;          // center sample
  double rho = 0.0;        // element scale
  double omega_rho = 0.0;  // element peak frequency, peak_omega / rho
  std::complex<double> c;  // amplitude and phase
};

struct EventTrain {
  morse::ElementSpec element{1.0, 2.0};
  std::size_t length = 0;
  std::vector<Event> events;
};

struct Synthetic {
  std::vector<double> clean;
  EventTrain truth;
};

// Six-event benchmark: first-order elements with peak frequencies stepping
// from 2*pi/100 down a decade in log10 steps of 0.2, phases (n-1)*pi/10, and
// amplitude chosen so each event's waveform peaks at 2.  Events are centered
// in a 12000-sample record, 2000 samples apart.
Synthetic benchmark_signal();

// Superposition of Re{ c psi((t - t_n) / rho_n) } over the train's events.
std::vector<double> render(const EventTrain& train);

std::vector<double> white_noise(std::size_t length, double sigma,
                                std::uint64_t seed);

// Cumulative sum of unit white noise, mean removed, scaled to unit
// population standard deviation.
std::vector<double> red_noise(std::size_t length, std::uint64_t seed);

}  // namespace elan::synth
