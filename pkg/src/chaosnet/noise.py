"""Robustness of a trained model to additive Gaussian noise on its mean vectors."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classifier import TrainedModel, classify_features, evaluate_labels, with_mean_vectors


@dataclass(frozen=True)
class NoiseTrial:
    sigma: float
    trial: int
    seed: int
    snr_db: float
    accuracy: float


def perturb_model(model: TrainedModel, sigma: float, seed) -> tuple[TrainedModel, np.ndarray]:
    """Add independent N(0, sigma^2) noise to every mean-vector component.

    Components are not clamped.  Returns the perturbed model and the noise drawn.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    shape = model.mean_vectors.shape
    if sigma == 0:
        return model, np.zeros(shape)
    noise = np.random.default_rng(seed).normal(0.0, sigma, size=shape)
    return with_mean_vectors(model, model.mean_vectors + noise), noise


def snr_db(model: TrainedModel, noise) -> float:
    """10 log10(signal power / realised noise power); +inf for zero noise."""
    signal = np.asarray(model.mean_vectors, dtype=float)
    noise = np.asarray(noise, dtype=float)
    if noise.shape != signal.shape:
        raise ValueError(f"noise shape {noise.shape} does not match mean vectors {signal.shape}")
    p_noise = float(np.sum(noise**2))
    if p_noise == 0.0:
        return math.inf
    p_signal = float(np.sum(signal**2))
    if p_signal == 0.0:
        return -math.inf
    return 10.0 * math.log10(p_signal / p_noise)


def trial_seed(base_seed: int, sigma_index: int, trial: int) -> int:
    """Independent per-trial seed derived from the sweep's base seed."""
    ss = np.random.SeedSequence([int(base_seed), int(sigma_index), int(trial)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def noise_sweep(model: TrainedModel, test_features, true_labels, sigmas, trials: int, seed) -> list[NoiseTrial]:
    """Perturb-and-evaluate for every (sigma, trial); sorted by sigma then trial.

    ``test_features`` are the already-extracted features of the test rows; they
    do not depend on the mean vectors, so they are computed once by the caller
    (see :func:`chaosnet.classifier.extract_test_features`).
    """
    sigmas = [float(s) for s in sigmas]
    if not sigmas:
        raise ValueError("sigma list is empty")
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    feats = np.asarray(test_features, dtype=float)
    labels = list(true_labels)
    if feats.shape[0] != len(labels):
        raise ValueError(f"{feats.shape[0]} feature rows for {len(labels)} labels")
    order = sorted(range(len(sigmas)), key=lambda i: sigmas[i])
    out = []
    for i in order:
        sigma = sigmas[i]
        for t in range(trials):
            s = trial_seed(seed, i, t)
            noisy, noise = perturb_model(model, sigma, s)
            pred = [model.classes[k] for k in classify_features(noisy.mean_vectors, feats)]
            acc = evaluate_labels(pred, labels, model.classes).accuracy
            out.append(NoiseTrial(sigma, t, s, snr_db(model, noise), acc))
    return out


def median_accuracy_by_sigma(trials) -> list[tuple[float, float]]:
    by_sigma: dict = {}
    for tr in trials:
        by_sigma.setdefault(tr.sigma, []).append(tr.accuracy)
    return [(s, float(np.median(v))) for s, v in sorted(by_sigma.items())]
