"""Exact graded polynomial and q-series arithmetic"""
