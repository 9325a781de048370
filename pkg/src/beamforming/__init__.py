"""
Beamforming Module - Trackers de SCM e Pesos MPDR/GSC
"""

from .beamform import BeamformerWeights, gsc_weights, mpdr_weights
from .scm import GscTracker, ScmTracker

__all__ = ["BeamformerWeights", "gsc_weights", "mpdr_weights", "GscTracker", "ScmTracker"]
