"""Module containing the filesystem dataset repository.

Layout of a dataset directory:
    manifest.json   format version, configuration echo, counts, sha256 checksums
    samples.jsonl   one SampleRecordDTO per line
    blobs.bin       little-endian float64 arrays of every sample
"""

import json
import logging
from pathlib import Path

from pydantic import ValidationError

from facepnp.core.domain.errors import DatasetError
from facepnp.core.domain.scene import Dataset, SceneConfig
from facepnp.core.repositories.idataset import IDatasetRepository
from facepnp.infrastructure.dto.sampledto import SampleRecordDTO
from facepnp.infrastructure.utils.blobs import (
    check_header,
    dump_json,
    pack,
    read_bytes,
    read_json,
    sha256_hex,
    unpack,
    verify,
    write_bytes,
)
from facepnp.infrastructure.utils.consts import (
    BLOBS_FILE,
    ENDIANNESS,
    FORMAT_VERSION,
    MANIFEST_FILE,
    SAMPLES_FILE,
)

logger = logging.getLogger(__name__)


class DatasetRepository(IDatasetRepository):
    """A class representing the dataset directory repository."""

    def write(self, path: Path, dataset: Dataset) -> None:
        """Persist a dataset under a directory.

        Raises:
            DatasetError: If the directory cannot be written.
        """
        path = Path(path)
        try:
            path.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise DatasetError(f"cannot create {path}: {e}") from e

        lines, arrays, offset = [], [], 0
        for sample in dataset.samples:
            record = SampleRecordDTO.from_sample(sample, offset)
            lines.append(record.model_dump_json())
            arrays.extend(SampleRecordDTO.arrays_of(sample))
            offset += record.size
        index = "".join(f"{line}\n" for line in lines).encode("utf-8")
        blob = pack(arrays)

        first = dataset.samples[0] if dataset.samples else None
        manifest = {
            "version": FORMAT_VERSION,
            "endianness": ENDIANNESS,
            "config": dataset.cfg.model_dump(mode="json"),
            "counts": {
                "samples": dataset.n_samples,
                "vertices": first.mesh.n_vertices if first else dataset.cfg.n_vertices,
                "k": first.coeffs.k if first else dataset.cfg.k,
            },
            "checksums": {
                SAMPLES_FILE: sha256_hex(index),
                BLOBS_FILE: sha256_hex(blob),
            },
        }
        write_bytes(path / SAMPLES_FILE, index)
        write_bytes(path / BLOBS_FILE, blob)
        write_bytes(path / MANIFEST_FILE, dump_json(manifest).encode("utf-8"))
        logger.info("Wrote %d samples to %s", dataset.n_samples, path)

    def read(self, path: Path) -> Dataset:
        """Load a dataset from a directory.

        Raises:
            DatasetError: If a file is missing or malformed.
            FormatVersionMismatch: If the manifest version is unsupported.
            ChecksumMismatch: If a payload does not match the manifest.
        """
        path = Path(path)
        manifest = read_json(path / MANIFEST_FILE)
        check_header(manifest, str(path / MANIFEST_FILE))
        checksums = manifest.get("checksums", {})

        index = read_bytes(path / SAMPLES_FILE)
        blob_bytes = read_bytes(path / BLOBS_FILE)
        verify(index, checksums.get(SAMPLES_FILE, ""), SAMPLES_FILE)
        verify(blob_bytes, checksums.get(BLOBS_FILE, ""), BLOBS_FILE)
        blob = unpack(blob_bytes)

        try:
            cfg = SceneConfig.model_validate(manifest["config"])
            records = [
                SampleRecordDTO.from_record(json.loads(line))
                for line in index.decode("utf-8").splitlines()
                if line.strip()
            ]
            samples = [record.to_sample(blob) for record in records]
        except (KeyError, json.JSONDecodeError, ValidationError) as e:
            raise DatasetError(f"malformed dataset {path}: {e}") from e

        expected = manifest.get("counts", {}).get("samples", len(samples))
        if expected != len(samples):
            raise DatasetError(f"manifest announces {expected} samples, found {len(samples)}")
        logger.info("Read %d samples from %s", len(samples), path)
        return Dataset(cfg=cfg, samples=samples)
