"""Template-cascade extraction of proceedings volumes into an RDF dataset."""

__version__ = "0.1.0"
