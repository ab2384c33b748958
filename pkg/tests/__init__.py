"""Tests for oodrl_bench"""
