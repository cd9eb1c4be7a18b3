"""GIF codec and local-color-table decimation."""

from .codec import decode, encode
from .color import NormColor, color_distance, nearest_index, table_dissimilarity
from .decimate import build_remap, decimate, decimate_bytes, sweep
from .lzw import lzw_compress, lzw_decompress
from .model import ColorTable, Extension, Frame, GifFile, GraphicControl, LogicalScreen
from .quality import bitrate, frame_mse, psnr, sequence_mse

__all__ = [
    "ColorTable", "Extension", "Frame", "GifFile", "GraphicControl", "LogicalScreen",
    "NormColor", "bitrate", "build_remap", "color_distance", "decimate", "decimate_bytes",
    "decode", "encode", "frame_mse", "lzw_compress", "lzw_decompress", "nearest_index",
    "psnr", "sequence_mse", "sweep", "table_dissimilarity",
]
