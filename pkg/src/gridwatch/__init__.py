"""Agentless monitoring portal: poll monitor, pluggable gatherers, XSLT rendering."""

__version__ = "0.1.0"
