"""Конструкции над типами и операциями-графами"""
