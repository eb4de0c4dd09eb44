"""Module containing the PCA model file repository.

A model file is one JSON header line followed by the payload: the mean,
the basis in column-major order, then the component scales.
"""

import json
import logging
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from facepnp.core.domain.errors import DatasetError
from facepnp.core.domain.shape import PcaModel
from facepnp.core.repositories.ipcamodel import IPcaModelRepository
from facepnp.infrastructure.utils.blobs import check_header, pack, read_bytes, sha256_hex, unpack, verify, write_bytes
from facepnp.infrastructure.utils.consts import ENDIANNESS, FORMAT_VERSION

logger = logging.getLogger(__name__)


class PcaModelRepository(IPcaModelRepository):
    """A class representing the PCA model file repository."""

    def save(self, path: Path, model: PcaModel) -> None:
        payload = pack([model.mean, model.basis.T, model.component_scales])
        header = {
            "version": FORMAT_VERSION,
            "endianness": ENDIANNESS,
            "n_vertices": model.n_vertices,
            "k": model.k,
            "sha256": sha256_hex(payload),
        }
        line = json.dumps(header, sort_keys=True).encode("utf-8") + b"\n"
        write_bytes(Path(path), line + payload)
        logger.info("Saved PCA model (N=%d, K=%d) to %s", model.n_vertices, model.k, path)

    def load(self, path: Path) -> PcaModel:
        """Read a model file.

        Raises:
            DatasetError: If the file is missing or malformed.
            FormatVersionMismatch: If the header version is unsupported.
            ChecksumMismatch: If the payload does not match the header.
        """
        content = read_bytes(Path(path))
        head, sep, payload = content.partition(b"\n")
        if not sep:
            raise DatasetError(f"{path}: missing model header")
        try:
            header = json.loads(head.decode("utf-8"))
            n3, k = 3 * int(header["n_vertices"]), int(header["k"])
        except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise DatasetError(f"{path}: malformed model header: {e}") from e
        check_header(header, str(path))
        verify(payload, header.get("sha256", ""), str(path))

        values = unpack(payload)
        if values.shape[0] != n3 + n3 * k + k:
            raise DatasetError(f"{path}: payload size does not match N={n3 // 3}, K={k}")
        try:
            return PcaModel(
                mean=values[:n3],
                basis=values[n3:n3 + n3 * k].reshape(k, n3).T,
                component_scales=values[n3 + n3 * k:],
            )
        except ValidationError as e:
            raise DatasetError(f"{path}: invalid model: {e}") from e
