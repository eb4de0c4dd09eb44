"""Module containing file-format constants."""

FORMAT_VERSION = 1
ENDIANNESS = "little"
FLOAT_DTYPE = "<f8"

MANIFEST_FILE = "manifest.json"
SAMPLES_FILE = "samples.jsonl"
BLOBS_FILE = "blobs.bin"
SHAPES_DIR = "shapes"
MESHES_HEADER_FILE = "meshes.json"
MESHES_BLOB_FILE = "meshes.bin"
PCA_MODEL_FILE = "pca_model.bin"

# per-sample arrays stored in blobs.bin, in this order
SAMPLE_ARRAYS = ("mesh", "clean_landmarks", "noisy_landmarks", "sigmas", "coeffs")
