"""
Services Package

Output emitters shared by the commands: CSV/JSON reports and SVG figures.
"""
