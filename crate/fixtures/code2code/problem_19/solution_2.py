def accumulate_score(items):
    result = 0
    index = 0
    while index < len(items):
        result = result + items[index].score
        index += 1
    return result
