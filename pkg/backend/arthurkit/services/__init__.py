"""
Document loading, wall tables and report rendering.
"""
