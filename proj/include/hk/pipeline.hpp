#pragma once

#include <vector>

#include "hk/frames.hpp"
#include "hk/jets.hpp"

namespace hk {

template <class S>
struct PrepotentialT {
    Dims d;
    SeriesT<S> L;
    int order() const { return L.order(); }
};

// Checks charge 4, z+ independence and vanishing at z = 0.
template <class S>
PrepotentialT<S> validate_prepotential(const SeriesT<S>& L, const Dims& d);

template <class S>
FrameFieldT<S> build_Hpp(const PAlgebra& P, const PrepotentialT<S>& L);

template <class S>
using SeriesMatrix = std::vector<std::vector<SeriesT<S>>>;

template <class S>
struct BridgeT {
    Dims d;
    int order = 0;
    std::vector<SeriesT<S>> phi_minus;  // phi^{-a}, analytic, charge +1
    std::vector<SeriesT<S>> phi_plus;   // phi^{+a}, analytic, charge -1
    std::vector<SeriesT<S>> phi_ia;     // phi^{ia} at i*2n + a, central, charge 0
    SeriesMatrix<S> Phi;                // phi^a_b, analytic, charge 0
    SeriesMatrix<S> psi;                // log Phi when the logarithm terminates
    bool psi_available = false;
    int iterations = 0;                 // Picard sweeps used by the vector part
};

struct BridgeOptions {
    int max_bound = -1;  // u-degree cap for the raising solves; -1 picks 64
    int max_iterations = -1;  // -1 picks D + 4n + 2
};

template <class S>
BridgeT<S> solve_bridge(const PAlgebra& P, const PrepotentialT<S>& L, const BridgeOptions& opt = {});

// Residuals of the bridge equations and of the slice pinning; all exact zeros in the exact backend.
template <class S>
ResidualReport bridge_residuals(const PAlgebra& P, const PrepotentialT<S>& L, const BridgeT<S>& B);

// z^{±a} as series in w, inverting w = phi(z) in analytic coordinates.
template <class S>
std::vector<SeriesT<S>> invert_bridge(const BridgeT<S>& B, int max_iterations = -1);

template <class S>
HKFrameT<S> build_frame(const PAlgebra& P, const PrepotentialT<S>& L, const BridgeT<S>& B, const FrameFieldT<S>& Hpp);

// Convenience: validate, build H++, bridge and frame.
template <class S>
HKFrameT<S> build_canonical_frame(const PAlgebra& P, const PrepotentialT<S>& L, BridgeT<S>* bridge_out = nullptr);

template <class S>
PrepotentialT<S> extract_prepotential(const PAlgebra& P, const HKFrameT<S>& F);

using Prepotential = PrepotentialT<GaussQ>;
using Bridge = BridgeT<GaussQ>;

}  // namespace hk
