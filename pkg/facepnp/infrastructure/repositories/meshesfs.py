"""Module containing the mesh collection directory repository."""

import logging
from pathlib import Path
from typing import List, Sequence

from facepnp.core.domain.errors import DatasetError, InconsistentVertexCount
from facepnp.core.domain.shape import CanonicalMesh
from facepnp.core.repositories.imeshes import IMeshCollectionRepository
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
from facepnp.infrastructure.utils.consts import ENDIANNESS, FORMAT_VERSION, MESHES_BLOB_FILE, MESHES_HEADER_FILE

logger = logging.getLogger(__name__)


class MeshCollectionRepository(IMeshCollectionRepository):
    """A class representing the mesh collection directory repository."""

    def save(self, path: Path, meshes: Sequence[CanonicalMesh]) -> None:
        """Write meshes.json and meshes.bin under a directory.

        Raises:
            InconsistentVertexCount: If the meshes disagree on N.
            DatasetError: If the directory cannot be written.
        """
        counts = {mesh.n_vertices for mesh in meshes}
        if len(counts) > 1:
            raise InconsistentVertexCount(f"meshes have differing vertex counts {sorted(counts)}")
        path = Path(path)
        try:
            path.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise DatasetError(f"cannot create {path}: {e}") from e

        payload = pack([mesh.vertices for mesh in meshes])
        header = {
            "version": FORMAT_VERSION,
            "endianness": ENDIANNESS,
            "count": len(meshes),
            "n_vertices": counts.pop() if counts else 0,
            "sha256": sha256_hex(payload),
        }
        write_bytes(path / MESHES_BLOB_FILE, payload)
        write_bytes(path / MESHES_HEADER_FILE, dump_json(header).encode("utf-8"))
        logger.info("Wrote %d meshes to %s", len(meshes), path)

    def load(self, path: Path) -> List[CanonicalMesh]:
        """Read a mesh collection directory.

        Raises:
            DatasetError: If a file is missing or malformed.
            FormatVersionMismatch: If the header version is unsupported.
            ChecksumMismatch: If the payload does not match the header.
        """
        path = Path(path)
        header = read_json(path / MESHES_HEADER_FILE)
        check_header(header, str(path / MESHES_HEADER_FILE))
        payload = read_bytes(path / MESHES_BLOB_FILE)
        verify(payload, header.get("sha256", ""), MESHES_BLOB_FILE)

        count, n = int(header.get("count", 0)), int(header.get("n_vertices", 0))
        values = unpack(payload)
        if values.shape[0] != count * n * 3:
            raise DatasetError(f"{path}: payload size does not match {count} meshes of {n} vertices")
        return [CanonicalMesh(vertices=block) for block in values.reshape(count, n, 3)]
