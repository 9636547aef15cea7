"""Forward model for buried metallic objects in conducting, permeable soil."""

__version__ = "0.1.0"
