"""Named entity recognition, linking and evaluation for noisy OCRed text."""

__version__ = "0.1.0"
