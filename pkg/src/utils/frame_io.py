"""
Frame, certificate and generator-spec files

Frame JSON: {"dim": d, "vectors": [[[re, im], ...], ...]} with one row per
vector. Extra top-level keys (e.g. "generator") are written for provenance
and ignored on load.
"""

import json
import logging
from pathlib import Path
from typing import Dict, Optional

import numpy as np

from frames.base import FrameError, FrameFamily
from frames.generators import GenSpec
from frames.weaving import WovenCertificate

logger = logging.getLogger(__name__)


class FrameFileError(FrameError):
    """A frame or certificate file is missing or malformed"""
    pass


def frame_to_dict(F: FrameFamily, extra: Optional[Dict] = None) -> Dict:
    data = {
        'dim': F.dim,
        'vectors': [[[float(z.real), float(z.imag)] for z in row] for row in F.vectors],
    }
    if extra:
        data.update(extra)
    return data


def frame_from_dict(data: Dict) -> FrameFamily:
    """
    Rebuild a family from its JSON form

    Raises:
        FrameFileError: on missing fields or inconsistent shapes
    """
    try:
        dim = int(data['dim'])
        rows = data['vectors']
    except (KeyError, TypeError, ValueError) as e:
        raise FrameFileError(f"Frame JSON needs 'dim' and 'vectors': {e}")

    try:
        pairs = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as e:
        raise FrameFileError(f"Vectors must be lists of [re, im] pairs: {e}")

    if pairs.size == 0:
        return FrameFamily(np.zeros((0, dim), dtype=complex), dim=dim)
    if pairs.ndim != 3 or pairs.shape[2] != 2 or pairs.shape[1] != dim:
        raise FrameFileError(f"Expected vectors of shape (n, {dim}, 2), got {pairs.shape}")

    try:
        return FrameFamily(pairs[..., 0] + 1j * pairs[..., 1])
    except ValueError as e:
        raise FrameFileError(str(e))


def _read_json(path: Path) -> Dict:
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except OSError as e:
        raise FrameFileError(f"Cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise FrameFileError(f"{path} is not valid JSON: {e}")


def _write_json(path: Path, data: Dict) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2)
        f.write('\n')
    return path


def load_frame(path: Path) -> FrameFamily:
    """
    Raises:
        FrameFileError: if the file cannot be read or parsed
    """
    family = frame_from_dict(_read_json(path))
    logger.debug(f"Loaded {family} from {path}")
    return family


def save_frame(F: FrameFamily, path: Path, extra: Optional[Dict] = None) -> Path:
    path = _write_json(path, frame_to_dict(F, extra))
    logger.info(f"Wrote {F.n} vectors in C^{F.dim} to {path}")
    return path


def load_certificate(path: Path) -> WovenCertificate:
    data = _read_json(path)
    try:
        return WovenCertificate.from_dict(data)
    except (KeyError, TypeError, ValueError) as e:
        raise FrameFileError(f"{path} is not a woven certificate: {e}")


def save_certificate(cert: WovenCertificate, path: Path) -> Path:
    path = _write_json(path, cert.to_dict())
    logger.info(f"Wrote certificate to {path}")
    return path


def load_gen_spec(path: Path) -> GenSpec:
    """
    Read a generator spec: either a bare {"kind": ..., "dim": ...} object or
    any file carrying one under "generator" (the provenance gen writes into
    every frame file)

    Raises:
        FrameFileError: if the file cannot be read or the fields do not convert
    """
    data = _read_json(path)
    if isinstance(data, dict) and isinstance(data.get('generator'), dict):
        data = data['generator']
    if not isinstance(data, dict):
        raise FrameFileError(f"{path} does not hold a generator spec object")
    try:
        spec = GenSpec.from_dict(data)
    except (TypeError, ValueError) as e:
        raise FrameFileError(f"{path} is not a generator spec: {e}")
    logger.debug(f"Loaded generator spec {spec} from {path}")
    return spec
