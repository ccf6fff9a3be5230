"""Layered GSM.

Fast antenna reflection S-parameters above planar stratified media.
"""
