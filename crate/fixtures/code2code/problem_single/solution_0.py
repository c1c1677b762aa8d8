def lonely(x):
    return x + 1
